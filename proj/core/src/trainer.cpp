#include "usergraph/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace usergraph {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct TrainPair {
  NodeId anchor;
  NodeId positive;
  EdgeKind kind;
};

NodeId pick_endpoint(const EdgeRec& e, NodeKind kind) {
  if (e.a.kind == kind) return e.a;
  if (e.b.kind == kind) return e.b;
  throw std::logic_error("edge lacks expected endpoint kind");
}

// One anchored pair per edge. Type edges anchor at the non-type endpoint,
// desc_user edges at the user, user_user edges at the lower-indexed user,
// so negatives for desc/type positives stay cheap free vectors.
std::vector<TrainPair> make_pairs(const InfoGraph& g,
                                  const std::array<double, kNumEdgeKinds>* lambda) {
  std::vector<TrainPair> pairs;
  pairs.reserve(g.edges().size());
  for (const EdgeRec& e : g.edges()) {
    if (lambda && (*lambda)[static_cast<int>(e.kind)] == 0.0) continue;
    NodeId anchor, positive;
    switch (e.kind) {
      case EdgeKind::DescType:
        anchor = pick_endpoint(e, NodeKind::Desc);
        positive = pick_endpoint(e, NodeKind::Type);
        break;
      case EdgeKind::UserType:
        anchor = pick_endpoint(e, NodeKind::User);
        positive = pick_endpoint(e, NodeKind::Type);
        break;
      case EdgeKind::DescUser:
        anchor = pick_endpoint(e, NodeKind::User);
        positive = pick_endpoint(e, NodeKind::Desc);
        break;
      case EdgeKind::UserUser:
        anchor = e.a;
        positive = e.b;
        break;
    }
    pairs.push_back({anchor, positive, e.kind});
  }
  return pairs;
}

struct BatchUser {
  Eigen::VectorXd vec;
  Eigen::VectorXd gout;
  EncoderActivation act;  // generic path only
};

struct BatchStats {
  std::array<double, kNumEdgeKinds> loss_sum{};  // mean-over-negatives per pair
  std::array<int, kNumEdgeKinds> loss_count{};
  int used_pairs = 0;
};

// Runs one batch of pairs: samples negatives, computes the batch loss
// J = (1/used) * sum_pairs lambda * mean_neg pair_loss, and accumulates
// dJ/d(theta) into the provided zeroed gradient buffers. word_g may be null
// when the word table is frozen. Shared by the training loop and the
// end-to-end gradient checks.
BatchStats process_pair_batch(const EmbeddingSpace& space, const InfoGraph& graph,
                              const TrainConfig& config, const TrainPair* batch,
                              std::size_t batch_len, Rng& rng, Eigen::MatrixXd& desc_g,
                              Eigen::MatrixXd& type_g, EncoderGrads& enc_g,
                              Eigen::MatrixXd* word_g) {
  BatchStats stats;
  const bool fast_meanpool =
      space.encoder.variant == EncoderVariant::MeanPool && !space.words.trainable;
  const int d = space.d;

  // Sample negatives first so the batch's user set is known up front.
  struct Item {
    const TrainPair* pair;
    std::vector<NodeId> negatives;
  };
  std::vector<Item> items;
  items.reserve(batch_len);
  std::map<int, BatchUser> users;  // deterministic iteration order
  auto note_user = [&](NodeId nid) {
    if (nid.kind == NodeKind::User) users.try_emplace(nid.index);
  };
  for (std::size_t p = 0; p < batch_len; ++p) {
    std::vector<NodeId> negs = sample_negatives(graph, batch[p].anchor, batch[p].positive,
                                                config.negatives_per_positive, rng);
    if (negs.empty()) continue;  // no candidates; pair skipped
    for (const NodeId& neg : negs) {
      if (graph.has_edge(batch[p].anchor, neg)) {
        throw std::logic_error("train: sampled negative adjacent to anchor");
      }
      note_user(neg);
    }
    note_user(batch[p].anchor);
    note_user(batch[p].positive);
    items.push_back({&batch[p], std::move(negs)});
  }
  stats.used_pairs = static_cast<int>(items.size());
  if (items.empty()) return stats;

  for (auto& [index, entry] : users) {
    if (fast_meanpool) {
      entry.vec = space.encoder.proj * space.tokens.mean.row(index).transpose();
    } else {
      entry.vec = encode_rows(space.words, space.encoder,
                              space.tokens.rows[static_cast<std::size_t>(index)], &entry.act);
    }
    entry.gout = Eigen::VectorXd::Zero(d);
  }

  auto node_vec = [&](NodeId nid) -> Eigen::VectorXd {
    switch (nid.kind) {
      case NodeKind::User: return users.at(nid.index).vec;
      case NodeKind::Desc: return space.desc_vectors.row(nid.index).transpose();
      case NodeKind::Type: return space.type_vectors.row(nid.index).transpose();
    }
    throw std::invalid_argument("train: bad node kind");
  };
  auto add_grad = [&](NodeId nid, const Eigen::VectorXd& g) {
    switch (nid.kind) {
      case NodeKind::User: users.at(nid.index).gout += g; break;
      case NodeKind::Desc: desc_g.row(nid.index) += g.transpose(); break;
      case NodeKind::Type: type_g.row(nid.index) += g.transpose(); break;
    }
  };

  const double inv_batch = 1.0 / static_cast<double>(items.size());
  for (const Item& item : items) {
    const TrainPair& pr = *item.pair;
    const double lambda = config.objective_weights[static_cast<int>(pr.kind)];
    const double w = lambda * inv_batch / static_cast<double>(item.negatives.size());

    const Eigen::VectorXd va = node_vec(pr.anchor);
    const Eigen::VectorXd vp = node_vec(pr.positive);
    const double s_p = va.dot(vp);

    double pair_sum = 0.0;
    Eigen::VectorXd ga = Eigen::VectorXd::Zero(d);
    double gp_coeff = 0.0;  // total d(loss)/d(s_p)
    for (const NodeId& neg : item.negatives) {
      const Eigen::VectorXd vn = node_vec(neg);
      const double s_n = va.dot(vn);
      pair_sum += pair_loss(s_p, s_n);
      const double sig = stable_sigmoid(s_n - s_p);  // d(loss)/d(s_n)
      gp_coeff -= sig;
      ga += w * sig * vn;
      add_grad(neg, (w * sig) * va);
    }
    ga += w * gp_coeff * vp;
    add_grad(pr.anchor, ga);
    add_grad(pr.positive, (w * gp_coeff) * va);

    stats.loss_sum[static_cast<int>(pr.kind)] +=
        pair_sum / static_cast<double>(item.negatives.size());
    ++stats.loss_count[static_cast<int>(pr.kind)];
  }

  // Push accumulated user-output gradients through the encoder.
  for (auto& [index, entry] : users) {
    if (entry.gout.isZero(0.0)) continue;
    if (fast_meanpool) {
      enc_g.proj.noalias() += entry.gout * space.tokens.mean.row(index);
    } else {
      EncoderGrads g = encoder_backward(space.encoder, entry.act, entry.gout);
      enc_g.add_scaled(g, 1.0);
    }
  }
  if (word_g != nullptr) {
    for (const auto& [row, g] : enc_g.word_grads) {
      word_g->row(row) += g.transpose();
    }
    word_g->row(space.words.oov_row()).setZero();  // OOV stays pinned at zero
  }
  return stats;
}

}  // namespace

void TrainConfig::validate() const {
  for (double w : objective_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("train: objective weights must be finite and >= 0");
    }
  }
  if (negatives_per_positive <= 0) throw std::invalid_argument("train: negatives_per_positive must be positive");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("train: learning_rate must be positive");
  if (batch_size <= 0) throw std::invalid_argument("train: batch_size must be positive");
  if (max_epochs <= 0) throw std::invalid_argument("train: max_epochs must be positive");
  if (patience <= 0) throw std::invalid_argument("train: patience must be positive");
  if (patience > max_epochs) throw std::invalid_argument("train: patience must be <= max_epochs");
}

double pair_loss(double s_pos, double s_neg) {
  const double x = s_neg - s_pos;
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

std::vector<NodeId> sample_negatives(const InfoGraph& graph, NodeId anchor,
                                     NodeId positive, int n, Rng& rng) {
  if (n <= 0) return {};
  const NodeKind kind = positive.kind;
  const int total = (kind == NodeKind::Type) ? kNumTypes : graph.n_users();

  std::vector<char> blocked(static_cast<std::size_t>(total), 0);
  for (const AdjEntry& e : graph.adjacency(anchor)) {
    if (e.other.kind == kind) blocked[static_cast<std::size_t>(e.other.index)] = 1;
  }
  if (anchor.kind == kind) blocked[static_cast<std::size_t>(anchor.index)] = 1;

  std::vector<int> candidates;
  candidates.reserve(static_cast<std::size_t>(total));
  for (int c = 0; c < total; ++c) {
    if (!blocked[static_cast<std::size_t>(c)]) candidates.push_back(c);
  }
  if (candidates.empty()) return {};

  std::vector<NodeId> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    out.push_back({kind, candidates[rng.next_below(candidates.size())]});
  }
  return out;
}

UserTokenTable UserTokenTable::build(const Corpus& corpus, const VocabEmbeddings& vocab,
                                     int max_seq_len) {
  const int n = static_cast<int>(corpus.users.size());
  UserTokenTable table;
  table.rows.resize(static_cast<std::size_t>(n));
  table.mean = Eigen::MatrixXd::Zero(n, vocab.dim);
  for (int u = 0; u < n; ++u) {
    auto& rows = table.rows[static_cast<std::size_t>(u)];
    for (const TokenSeq& tweet : corpus.users[static_cast<std::size_t>(u)].tweet_tokens) {
      for (const std::string& token : tweet) {
        if (static_cast<int>(rows.size()) >= max_seq_len) break;
        rows.push_back(vocab.row_of(token));
      }
      if (static_cast<int>(rows.size()) >= max_seq_len) break;
    }
    if (!rows.empty()) {
      for (int r : rows) table.mean.row(u) += vocab.matrix.row(r);
      table.mean.row(u) /= static_cast<double>(rows.size());
    }
  }
  return table;
}

EmbeddingSpace EmbeddingSpace::init(const Corpus& corpus, VocabEmbeddings words,
                                    EncoderVariant variant, int d, int hidden, Rng& rng,
                                    int max_seq_len) {
  if (d <= 0) throw std::invalid_argument("embedding space: d must be positive");
  if (variant == EncoderVariant::BiLstm && d != 2 * hidden) {
    throw std::invalid_argument("embedding space: BiLstm requires d == 2*hidden");
  }
  EmbeddingSpace s;
  s.d = d;
  s.words = std::move(words);

  Rng enc_rng = rng.derive("encoder-init");
  s.encoder = (variant == EncoderVariant::MeanPool)
                  ? EncoderParams::mean_pool(d, s.words.dim, enc_rng)
                  : EncoderParams::bilstm(hidden, s.words.dim, enc_rng);
  s.encoder.max_seq_len = max_seq_len;

  const int n = static_cast<int>(corpus.users.size());
  const double lim = 0.5 / static_cast<double>(d);
  Rng free_rng = rng.derive("free-init");
  s.desc_vectors.resize(n, d);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < d; ++c) s.desc_vectors(r, c) = free_rng.next_range(-lim, lim);
  }
  s.type_vectors.resize(kNumTypes, d);
  for (int r = 0; r < kNumTypes; ++r) {
    for (int c = 0; c < d; ++c) s.type_vectors(r, c) = free_rng.next_range(-lim, lim);
  }

  s.tokens = UserTokenTable::build(corpus, s.words, max_seq_len);
  return s;
}

Eigen::VectorXd EmbeddingSpace::user_vector(int user) const {
  if (user < 0 || user >= desc_vectors.rows()) {
    throw std::out_of_range("embedding space: user index out of range");
  }
  if (encoder.variant == EncoderVariant::MeanPool && !words.trainable) {
    return encoder.proj * tokens.mean.row(user).transpose();
  }
  return encode_rows(words, encoder, tokens.rows[static_cast<std::size_t>(user)], nullptr);
}

Eigen::VectorXd EmbeddingSpace::node_vector(NodeId n) const {
  switch (n.kind) {
    case NodeKind::User: return user_vector(n.index);
    case NodeKind::Desc: return desc_vectors.row(n.index).transpose();
    case NodeKind::Type: return type_vectors.row(n.index).transpose();
  }
  throw std::invalid_argument("embedding space: bad node kind");
}

Eigen::MatrixXd EmbeddingSpace::all_user_vectors() const {
  const int n = static_cast<int>(desc_vectors.rows());
  if (encoder.variant == EncoderVariant::MeanPool && !words.trainable) {
    return tokens.mean * encoder.proj.transpose();
  }
  Eigen::MatrixXd out(n, d);
  for (int u = 0; u < n; ++u) out.row(u) = user_vector(u).transpose();
  return out;
}

void EmbeddingSpace::validate() const {
  encoder.validate();
  if (encoder.d != d) throw std::invalid_argument("embedding space: encoder dim mismatch");
  if (type_vectors.rows() != kNumTypes || type_vectors.cols() != d ||
      desc_vectors.cols() != d) {
    throw std::invalid_argument("embedding space: free-vector shape mismatch");
  }
  if (!desc_vectors.allFinite() || !type_vectors.allFinite() || !words.matrix.allFinite()) {
    throw std::invalid_argument("embedding space: non-finite vectors");
  }
  if (static_cast<int>(tokens.rows.size()) != desc_vectors.rows()) {
    throw std::invalid_argument("embedding space: token table size mismatch");
  }
}

TrainResult train_embeddings(EmbeddingSpace& space, const InfoGraph& graph,
                             const TrainConfig& config) {
  config.validate();
  space.validate();
  if (graph.edges().empty()) {
    throw std::invalid_argument("train: graph has no edges");
  }
  if (graph.n_users() != static_cast<int>(space.desc_vectors.rows())) {
    throw std::invalid_argument("train: graph/space user count mismatch");
  }

  std::vector<TrainPair> pairs = make_pairs(graph, &config.objective_weights);
  TrainResult result;
  if (pairs.empty()) {
    // Every present kind has weight zero; nothing to optimize.
    result.history.push_back({});
    result.best_epoch = 0;
    return result;
  }

  const int n_users = graph.n_users();
  const int d = space.d;

  // Fixed tensor order for Adam: free vectors, encoder, then word table.
  std::vector<Eigen::MatrixXd*> params = {&space.desc_vectors, &space.type_vectors};
  for (auto* t : space.encoder.tensors()) params.push_back(t);
  if (space.words.trainable) params.push_back(&space.words.matrix);

  Eigen::MatrixXd desc_g(n_users, d), type_g(kNumTypes, d);
  EncoderGrads enc_g = EncoderGrads::zero_like(space.encoder);
  Eigen::MatrixXd word_g;
  if (space.words.trainable) {
    word_g = Eigen::MatrixXd::Zero(space.words.matrix.rows(), space.words.matrix.cols());
  }
  std::vector<const Eigen::MatrixXd*> grads = {&desc_g, &type_g};
  for (auto* t : enc_g.tensors()) grads.push_back(t);
  if (space.words.trainable) grads.push_back(&word_g);

  AdamState adam;
  Rng root(config.seed);

  int best_epoch = -1;
  double best_loss = 0.0;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    Rng epoch_rng = root.derive("epoch-" + std::to_string(epoch));
    epoch_rng.shuffle(pairs);

    std::array<double, kNumEdgeKinds> loss_sum{};
    std::array<int, kNumEdgeKinds> loss_count{};

    for (std::size_t start = 0; start < pairs.size(); start += config.batch_size) {
      const std::size_t stop = std::min(pairs.size(), start + config.batch_size);

      desc_g.setZero();
      type_g.setZero();
      for (auto* t : enc_g.tensors()) t->setZero();
      enc_g.word_grads.clear();
      if (space.words.trainable) word_g.setZero();

      BatchStats stats = process_pair_batch(space, graph, config, pairs.data() + start,
                                            stop - start, epoch_rng, desc_g, type_g, enc_g,
                                            space.words.trainable ? &word_g : nullptr);
      if (stats.used_pairs == 0) continue;

      for (int k = 0; k < kNumEdgeKinds; ++k) {
        loss_sum[k] += stats.loss_sum[k];
        loss_count[k] += stats.loss_count[k];
      }
      adam_step(params, grads, adam, config.learning_rate);
    }

    EpochLoss record;
    for (int k = 0; k < kNumEdgeKinds; ++k) {
      record.pairs_by_kind[k] = loss_count[k];
      record.by_kind[k] = loss_count[k] > 0 ? loss_sum[k] / loss_count[k] : 0.0;
      record.total += config.objective_weights[k] * record.by_kind[k];
    }
    result.history.push_back(record);

    if (best_epoch < 0 || record.total < best_loss) {
      best_epoch = epoch;
      best_loss = record.total;
    } else if (epoch - best_epoch >= config.patience) {
      break;
    }
  }

  result.best_epoch = best_epoch;
  return result;
}

double total_loss(const EmbeddingSpace& space, const InfoGraph& graph,
                  const TrainConfig& config, Rng& rng) {
  space.validate();
  const Eigen::MatrixXd user_vecs = space.all_user_vectors();
  auto vec_of = [&](NodeId nid) -> Eigen::VectorXd {
    switch (nid.kind) {
      case NodeKind::User: return user_vecs.row(nid.index).transpose();
      case NodeKind::Desc: return space.desc_vectors.row(nid.index).transpose();
      case NodeKind::Type: return space.type_vectors.row(nid.index).transpose();
    }
    throw std::invalid_argument("total_loss: bad node kind");
  };

  // All kinds are evaluated regardless of their lambda so the sampling
  // stream does not depend on the weights.
  std::vector<TrainPair> pairs = make_pairs(graph, nullptr);
  std::array<double, kNumEdgeKinds> loss_sum{};
  std::array<int, kNumEdgeKinds> loss_count{};
  for (const TrainPair& pr : pairs) {
    std::vector<NodeId> negs =
        sample_negatives(graph, pr.anchor, pr.positive, config.negatives_per_positive, rng);
    if (negs.empty()) continue;
    const Eigen::VectorXd va = vec_of(pr.anchor);
    const double s_p = va.dot(vec_of(pr.positive));
    double sum = 0.0;
    for (const NodeId& neg : negs) sum += pair_loss(s_p, va.dot(vec_of(neg)));
    loss_sum[static_cast<int>(pr.kind)] += sum / static_cast<double>(negs.size());
    ++loss_count[static_cast<int>(pr.kind)];
  }

  double total = 0.0;
  for (int k = 0; k < kNumEdgeKinds; ++k) {
    if (loss_count[k] > 0) {
      total += config.objective_weights[k] * (loss_sum[k] / loss_count[k]);
    }
  }
  return total;
}

SpaceGrads SpaceGrads::zero_like(const EmbeddingSpace& space) {
  SpaceGrads g;
  g.desc = Eigen::MatrixXd::Zero(space.desc_vectors.rows(), space.desc_vectors.cols());
  g.type = Eigen::MatrixXd::Zero(space.type_vectors.rows(), space.type_vectors.cols());
  g.encoder = EncoderGrads::zero_like(space.encoder);
  if (space.words.trainable) {
    g.words = Eigen::MatrixXd::Zero(space.words.matrix.rows(), space.words.matrix.cols());
  }
  return g;
}

double pass_loss_and_gradients(const EmbeddingSpace& space, const InfoGraph& graph,
                               const TrainConfig& config, Rng& rng, SpaceGrads& grads) {
  config.validate();
  space.validate();
  grads = SpaceGrads::zero_like(space);
  std::vector<TrainPair> pairs = make_pairs(graph, &config.objective_weights);
  if (pairs.empty()) return 0.0;

  BatchStats stats = process_pair_batch(space, graph, config, pairs.data(), pairs.size(),
                                        rng, grads.desc, grads.type, grads.encoder,
                                        space.words.trainable ? &grads.words : nullptr);
  if (stats.used_pairs == 0) return 0.0;
  double loss = 0.0;
  for (int k = 0; k < kNumEdgeKinds; ++k) {
    loss += config.objective_weights[k] * stats.loss_sum[k];
  }
  return loss / static_cast<double>(stats.used_pairs);
}

std::string loss_history_to_csv(const std::vector<EpochLoss>& history) {
  std::ostringstream out;
  out << "epoch,total,desc_type,user_type,desc_user,user_user\n";
  out.precision(17);
  for (std::size_t e = 0; e < history.size(); ++e) {
    out << e << ',' << history[e].total;
    for (int k = 0; k < kNumEdgeKinds; ++k) out << ',' << history[e].by_kind[k];
    out << '\n';
  }
  return out.str();
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, Eigen::Index expect_cols = -1) {
  const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  Eigen::Index nc = nr > 0 ? static_cast<Eigen::Index>(rows[0].size()) : expect_cols;
  if (expect_cols >= 0) nc = expect_cols;
  Eigen::MatrixXd m(nr, nc);
  for (Eigen::Index r = 0; r < nr; ++r) {
    if (static_cast<Eigen::Index>(rows[r].size()) != nc) {
      throw std::runtime_error("checkpoint: ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < nc; ++c) m(r, c) = rows[r][c].get<double>();
  }
  return m;
}

}  // namespace

std::string checkpoint_to_json(const EmbeddingSpace& space) {
  ordered_json j;
  j["format"] = "usergraph-checkpoint-v1";
  j["d"] = space.d;

  ordered_json enc;
  enc["variant"] = to_string(space.encoder.variant);
  enc["word_dim"] = space.encoder.word_dim;
  enc["hidden"] = space.encoder.hidden;
  enc["max_seq_len"] = space.encoder.max_seq_len;
  if (space.encoder.variant == EncoderVariant::MeanPool) {
    enc["proj"] = matrix_to_json(space.encoder.proj);
  } else {
    for (auto [name, dir] : {std::pair{"fwd", &space.encoder.fwd},
                             std::pair{"bwd", &space.encoder.bwd}}) {
      ordered_json dj;
      dj["wx"] = matrix_to_json(dir->wx);
      dj["wh"] = matrix_to_json(dir->wh);
      dj["b"] = matrix_to_json(dir->b);
      enc[name] = std::move(dj);
    }
  }
  j["encoder"] = std::move(enc);

  j["desc_vectors"] = matrix_to_json(space.desc_vectors);
  j["type_vectors"] = matrix_to_json(space.type_vectors);

  ordered_json words;
  words["dim"] = space.words.dim;
  words["trainable"] = space.words.trainable;
  words["tokens"] = space.words.tokens;
  // The trailing OOV row is implicit (always zero).
  words["matrix"] = matrix_to_json(
      space.words.matrix.topRows(space.words.matrix.rows() - 1));
  j["words"] = std::move(words);
  return j.dump();
}

EmbeddingSpace checkpoint_from_json(const std::string& text, const Corpus& corpus) {
  json j = json::parse(text);
  if (!j.contains("format") || j["format"] != "usergraph-checkpoint-v1") {
    throw std::runtime_error("checkpoint: unknown format");
  }

  EmbeddingSpace s;
  s.d = j.at("d").get<int>();

  const json& wj = j.at("words");
  s.words.dim = wj.at("dim").get<int>();
  s.words.trainable = wj.at("trainable").get<bool>();
  s.words.tokens = wj.at("tokens").get<std::vector<std::string>>();
  Eigen::MatrixXd rows = matrix_from_json(wj.at("matrix"), s.words.dim);
  if (rows.rows() != static_cast<Eigen::Index>(s.words.tokens.size())) {
    throw std::runtime_error("checkpoint: word matrix/token count mismatch");
  }
  s.words.matrix = Eigen::MatrixXd::Zero(rows.rows() + 1, s.words.dim);
  s.words.matrix.topRows(rows.rows()) = rows;
  for (int r = 0; r < static_cast<int>(s.words.tokens.size()); ++r) {
    s.words.vocab.emplace(s.words.tokens[static_cast<std::size_t>(r)], r);
  }

  const json& ej = j.at("encoder");
  s.encoder.variant = encoder_variant_from_string(ej.at("variant").get<std::string>());
  s.encoder.word_dim = ej.at("word_dim").get<int>();
  s.encoder.hidden = ej.at("hidden").get<int>();
  s.encoder.max_seq_len = ej.at("max_seq_len").get<int>();
  s.encoder.d = s.d;
  if (s.encoder.variant == EncoderVariant::MeanPool) {
    s.encoder.proj = matrix_from_json(ej.at("proj"), s.encoder.word_dim);
  } else {
    for (auto [name, dir] : {std::pair{"fwd", &s.encoder.fwd},
                             std::pair{"bwd", &s.encoder.bwd}}) {
      const json& dj = ej.at(name);
      dir->wx = matrix_from_json(dj.at("wx"), s.encoder.word_dim);
      dir->wh = matrix_from_json(dj.at("wh"), s.encoder.hidden);
      dir->b = matrix_from_json(dj.at("b"), 1);
    }
  }

  s.desc_vectors = matrix_from_json(j.at("desc_vectors"), s.d);
  s.type_vectors = matrix_from_json(j.at("type_vectors"), s.d);
  if (s.desc_vectors.rows() != static_cast<Eigen::Index>(corpus.users.size())) {
    throw std::runtime_error("checkpoint: corpus size does not match desc_vectors");
  }

  s.tokens = UserTokenTable::build(corpus, s.words, s.encoder.max_seq_len);
  s.validate();
  return s;
}

}  // namespace usergraph
