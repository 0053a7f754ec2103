#include "usergraph/em.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace usergraph {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const char* to_string(PredictionSource s) {
  switch (s) {
    case PredictionSource::Weak: return "weak";
    case PredictionSource::Inferred: return "inferred";
    case PredictionSource::Final: return "final";
  }
  return "?";
}

void EmConfig::validate() const {
  if (k < 1) throw std::invalid_argument("em: k must be >= 1");
  if (!(churn_threshold > 0.0 && churn_threshold <= 1.0)) {
    throw std::invalid_argument("em: churn_threshold must be in (0,1]");
  }
  if (ensemble_size < 1) throw std::invalid_argument("em: ensemble_size must be >= 1");
  if (max_iterations < 1) throw std::invalid_argument("em: max_iterations must be >= 1");
  train.validate();
}

std::vector<Prediction> predict_types(const EmbeddingSpace& space, const InfoGraph& graph,
                                      const Corpus& corpus) {
  if (graph.n_users() != static_cast<int>(corpus.users.size()) ||
      graph.n_users() != static_cast<int>(space.desc_vectors.rows())) {
    throw std::invalid_argument("predict_types: corpus/graph/space size mismatch");
  }
  const Eigen::MatrixXd user_vecs = space.all_user_vectors();
  // scores(u, t) = phi(u) . phi(type_t)
  const Eigen::MatrixXd scores = user_vecs * space.type_vectors.transpose();

  std::vector<Prediction> out;
  out.reserve(corpus.users.size());
  for (int u = 0; u < graph.n_users(); ++u) {
    const double s0 = scores(u, 0);
    const double s1 = scores(u, 1);
    Prediction p;
    p.user_id = corpus.users[static_cast<std::size_t>(u)].user_id;
    p.label = s1 > s0 ? 1 : 0;  // tie resolves to the first declared type
    // |softmax(s0,s1)_0 - softmax(s0,s1)_1| == |tanh((s0 - s1)/2)|
    p.confidence = std::abs(std::tanh(0.5 * (s0 - s1)));
    p.source = PredictionSource::Inferred;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Promotion> infer_edges(const std::vector<std::vector<Prediction>>& ensemble,
                                   InfoGraph& graph, int k, const Corpus& corpus) {
  if (ensemble.empty()) throw std::invalid_argument("infer_edges: empty ensemble");
  if (k < 1) throw std::invalid_argument("infer_edges: k must be >= 1");

  std::vector<int> unlabeled;
  for (int u = 0; u < graph.n_users(); ++u) {
    if (!graph.user_type(u)) unlabeled.push_back(u);
  }
  if (unlabeled.empty()) return {};

  struct Tally {
    std::array<int, kNumTypes> votes{};
    std::array<double, kNumTypes> conf_sum{};
  };
  std::map<int, Tally> tallies;  // user index -> votes, deterministic order

  for (const auto& member : ensemble) {
    if (member.size() != corpus.users.size()) {
      throw std::invalid_argument("infer_edges: prediction set size mismatch");
    }
    // This member's unlabeled users, ranked by confidence (user index as a
    // deterministic tie-break).
    std::vector<int> ranked = unlabeled;
    std::sort(ranked.begin(), ranked.end(), [&](int a, int b) {
      const double ca = member[static_cast<std::size_t>(a)].confidence;
      const double cb = member[static_cast<std::size_t>(b)].confidence;
      if (ca != cb) return ca > cb;
      return a < b;
    });
    const std::size_t take = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < take; ++i) {
      const int u = ranked[i];
      const Prediction& p = member[static_cast<std::size_t>(u)];
      Tally& t = tallies[u];
      ++t.votes[p.label];
      t.conf_sum[p.label] += p.confidence;
    }
  }

  std::vector<Promotion> candidates;
  for (const auto& [u, tally] : tallies) {
    // Winning label: most votes, then higher summed confidence, then the
    // first declared type.
    int label = 0;
    if (tally.votes[1] > tally.votes[0] ||
        (tally.votes[1] == tally.votes[0] && tally.conf_sum[1] > tally.conf_sum[0])) {
      label = 1;
    }
    if (tally.votes[label] == 0) continue;
    Promotion pr;
    pr.user_index = u;
    pr.user_id = corpus.users[static_cast<std::size_t>(u)].user_id;
    pr.label = label;
    pr.votes = tally.votes[label];
    pr.mean_confidence = tally.conf_sum[label] / tally.votes[label];
    candidates.push_back(std::move(pr));
  }

  std::sort(candidates.begin(), candidates.end(), [](const Promotion& a, const Promotion& b) {
    if (a.votes != b.votes) return a.votes > b.votes;
    if (a.mean_confidence != b.mean_confidence) return a.mean_confidence > b.mean_confidence;
    return a.user_id < b.user_id;
  });
  if (static_cast<int>(candidates.size()) > k) candidates.resize(static_cast<std::size_t>(k));

  for (const Promotion& pr : candidates) {
    const bool added_user =
        graph.add_inferred_edge(user_node(pr.user_index), type_node(pr.label), EdgeKind::UserType);
    const bool added_desc =
        graph.add_inferred_edge(desc_node(pr.user_index), type_node(pr.label), EdgeKind::DescType);
    if (!added_user || !added_desc) {
      throw std::logic_error("infer_edges: promoted user already had a type edge");
    }
  }
  return candidates;
}

EmRunReport run_em(const Corpus& corpus, const WeakLabeling& weak, const EmConfig& config,
                   GraphView view, const ModelSetup& model) {
  return run_em(corpus, weak, config, view, model, nullptr, nullptr);
}

EmRunReport run_em(const Corpus& corpus, const WeakLabeling& weak, const EmConfig& config,
                   GraphView view, const ModelSetup& model,
                   EmbeddingSpace* canonical_space_out, InfoGraph* graph_out) {
  config.validate();
  if (weak.labels.empty()) throw std::invalid_argument("run_em: weak labeling is empty");

  InfoGraph graph = build_graph(corpus, weak, view);
  Rng root(config.train.seed);

  // Each ensemble member owns an independent parameter trajectory seeded
  // from its own substream.
  std::vector<EmbeddingSpace> members;
  std::vector<Rng> member_init;
  members.reserve(static_cast<std::size_t>(config.ensemble_size));
  for (int m = 0; m < config.ensemble_size; ++m) {
    member_init.push_back(root.derive("member-init-" + std::to_string(m)));
    Rng r = member_init.back();
    members.push_back(EmbeddingSpace::init(corpus, model.words, model.variant, model.d,
                                           model.hidden, r, model.max_seq_len));
  }

  EmRunReport report;
  report.view = view;
  std::vector<int> prev_labels;

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    IterationRecord record;
    record.iteration = iter;

    std::vector<std::vector<Prediction>> preds(members.size());
    for (std::size_t m = 0; m < members.size(); ++m) {
      if (config.cold_restart && iter > 1) {
        Rng r = member_init[m];  // same stream as iteration 1
        members[m] = EmbeddingSpace::init(corpus, model.words, model.variant, model.d,
                                          model.hidden, r, model.max_seq_len);
      }
      TrainConfig tc = config.train;
      tc.seed = root.derive("train-iter" + std::to_string(iter) + "-m" + std::to_string(m))
                    .next_u64();
      TrainResult tr = train_embeddings(members[m], graph, tc);
      if (m == 0) record.loss_history = std::move(tr.history);
      preds[m] = predict_types(members[m], graph, corpus);
    }

    std::vector<int> labels(preds[0].size());
    for (std::size_t i = 0; i < preds[0].size(); ++i) labels[i] = preds[0][i].label;

    bool stop = false;
    if (iter >= 2) {
      int changed = 0;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != prev_labels[i]) ++changed;
      }
      const double churn = static_cast<double>(changed) / static_cast<double>(labels.size());
      record.churn = churn;
      if (churn < config.churn_threshold) {
        report.stop_reason = "churn_below_threshold";
        stop = true;
      }
    }
    prev_labels = labels;

    if (!stop && iter == config.max_iterations) {
      report.stop_reason = "max_iterations";
      stop = true;
    }
    if (!stop) {
      record.promoted = infer_edges(preds, graph, config.k, corpus);
    }
    record.stats_after = graph.stats();
    report.iterations.push_back(std::move(record));
    report.iterations_run = iter;

    if (stop) {
      report.final_predictions = std::move(preds[0]);
      break;
    }
  }

  for (Prediction& p : report.final_predictions) {
    p.source = weak.label_of(p.user_id) ? PredictionSource::Weak : PredictionSource::Final;
  }
  report.final_stats = graph.stats();
  if (canonical_space_out) *canonical_space_out = std::move(members[0]);
  if (graph_out) *graph_out = std::move(graph);
  return report;
}

namespace {

ordered_json stats_to_json(const GraphStats& s) {
  ordered_json j;
  j["user_nodes"] = s.user_nodes;
  j["desc_nodes"] = s.desc_nodes;
  j["type_nodes"] = s.type_nodes;
  ordered_json obs, inf;
  for (int k = 0; k < kNumEdgeKinds; ++k) {
    obs[to_string(static_cast<EdgeKind>(k))] = s.observed_by_kind[k];
    inf[to_string(static_cast<EdgeKind>(k))] = s.inferred_by_kind[k];
  }
  j["observed_by_kind"] = std::move(obs);
  j["inferred_by_kind"] = std::move(inf);
  j["observed_total"] = s.observed_total();
  j["inferred_total"] = s.inferred_total();
  j["edge_total"] = s.edge_total();
  return j;
}

ordered_json prediction_to_json(const Prediction& p) {
  ordered_json j;
  j["user_id"] = p.user_id;
  j["label"] = p.label;
  j["confidence"] = p.confidence;
  j["source"] = to_string(p.source);
  return j;
}

}  // namespace

std::string em_report_to_json(const EmRunReport& report) {
  ordered_json j;
  j["iterations_run"] = report.iterations_run;
  j["stop_reason"] = report.stop_reason;
  j["view"] = to_string(report.view);
  j["iterations"] = json::array();
  for (const IterationRecord& rec : report.iterations) {
    ordered_json ij;
    ij["iteration"] = rec.iteration;
    ij["epochs"] = rec.loss_history.size();
    json losses = json::array();
    for (const EpochLoss& e : rec.loss_history) losses.push_back(e.total);
    ij["epoch_losses"] = std::move(losses);
    if (rec.churn) {
      ij["churn"] = *rec.churn;
    } else {
      ij["churn"] = nullptr;
    }
    ij["promoted"] = json::array();
    for (const Promotion& p : rec.promoted) {
      ordered_json pj;
      pj["user_id"] = p.user_id;
      pj["label"] = p.label;
      pj["votes"] = p.votes;
      pj["mean_confidence"] = p.mean_confidence;
      ij["promoted"].push_back(std::move(pj));
    }
    ij["graph"] = stats_to_json(rec.stats_after);
    j["iterations"].push_back(std::move(ij));
  }
  j["final_graph"] = stats_to_json(report.final_stats);
  j["final_predictions"] = json::array();
  for (const Prediction& p : report.final_predictions) {
    j["final_predictions"].push_back(prediction_to_json(p));
  }
  return j.dump(2);
}

std::string promotions_to_csv(const EmRunReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,user_id,label,votes,confidence\n";
  for (const IterationRecord& rec : report.iterations) {
    for (const Promotion& p : rec.promoted) {
      out << rec.iteration << ',' << p.user_id << ',' << p.label << ',' << p.votes << ','
          << p.mean_confidence << '\n';
    }
  }
  return out.str();
}

std::string em_losses_to_csv(const EmRunReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,epoch,total,desc_type,user_type,desc_user,user_user\n";
  for (const IterationRecord& rec : report.iterations) {
    for (std::size_t e = 0; e < rec.loss_history.size(); ++e) {
      out << rec.iteration << ',' << e << ',' << rec.loss_history[e].total;
      for (int k = 0; k < kNumEdgeKinds; ++k) out << ',' << rec.loss_history[e].by_kind[k];
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace usergraph
