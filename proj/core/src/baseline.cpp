#include "usergraph/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace usergraph {

namespace {

// Softmax cross-entropy against a one-hot target; returns the loss and the
// gradient with respect to the logits (p - onehot).
double softmax_xent(const Eigen::Vector2d& logits, int target, Eigen::Vector2d* dlogits) {
  const double mx = logits.maxCoeff();
  Eigen::Vector2d e = (logits.array() - mx).exp();
  const double z = e.sum();
  Eigen::Vector2d p = e / z;
  if (dlogits) {
    *dlogits = p;
    (*dlogits)(target) -= 1.0;
  }
  return -(std::log(e(target)) - std::log(z));
}

}  // namespace

Eigen::Vector2d BaselineClassifier::logits(int user) const {
  Eigen::VectorXd enc;
  if (encoder.variant == EncoderVariant::MeanPool && !words.trainable) {
    enc = encoder.proj * tokens.mean.row(user).transpose();
  } else {
    enc = encode_rows(words, encoder, tokens.rows[static_cast<std::size_t>(user)], nullptr);
  }
  return head_w * enc + head_b.col(0);
}

int BaselineClassifier::predict(int user) const {
  const Eigen::Vector2d s = logits(user);
  return s(1) > s(0) ? 1 : 0;
}

BaselineResult train_supervised_baseline(const Corpus& corpus, const WeakLabeling& weak,
                                         const TrainConfig& config,
                                         VocabEmbeddings words, EncoderVariant variant,
                                         int d, int hidden, int max_seq_len) {
  config.validate();
  std::vector<std::pair<int, int>> labeled;  // (user index, label)
  for (const auto& [user_id, label] : weak.labels) {
    const int idx = corpus.index_of(user_id);
    if (idx < 0) throw std::runtime_error("weak label references unknown user \"" + user_id + "\"");
    labeled.emplace_back(idx, label);
  }
  if (labeled.size() < 5) {
    throw std::runtime_error("baseline needs at least 5 weakly labeled users, has " +
                             std::to_string(labeled.size()));
  }

  Rng root(config.seed);
  BaselineResult result;
  BaselineClassifier& model = result.model;
  model.words = std::move(words);

  Rng init_rng = root.derive("baseline-init");
  model.encoder = (variant == EncoderVariant::MeanPool)
                      ? EncoderParams::mean_pool(d, model.words.dim, init_rng)
                      : EncoderParams::bilstm(hidden, model.words.dim, init_rng);
  model.encoder.max_seq_len = max_seq_len;
  model.tokens = UserTokenTable::build(corpus, model.words, max_seq_len);
  model.head_w.resize(kNumTypes, d);
  for (int r = 0; r < kNumTypes; ++r) {
    for (int c = 0; c < d; ++c) model.head_w(r, c) = init_rng.next_range(-0.08, 0.08);
  }
  model.head_b = Eigen::MatrixXd::Zero(kNumTypes, 1);

  // Seeded 20% validation split.
  Rng split_rng = root.derive("baseline-split");
  split_rng.shuffle(labeled);
  const int n_val = std::max(1, static_cast<int>(labeled.size() / 5));
  std::vector<std::pair<int, int>> val(labeled.begin(), labeled.begin() + n_val);
  std::vector<std::pair<int, int>> train(labeled.begin() + n_val, labeled.end());
  result.n_train = static_cast<int>(train.size());
  result.n_val = n_val;

  const bool fast_meanpool =
      model.encoder.variant == EncoderVariant::MeanPool && !model.words.trainable;

  std::vector<Eigen::MatrixXd*> params = {&model.head_w, &model.head_b};
  for (auto* t : model.encoder.tensors()) params.push_back(t);

  Eigen::MatrixXd head_w_g(kNumTypes, d);
  Eigen::MatrixXd head_b_g(kNumTypes, 1);
  EncoderGrads enc_g = EncoderGrads::zero_like(model.encoder);
  std::vector<const Eigen::MatrixXd*> grads = {&head_w_g, &head_b_g};
  for (auto* t : enc_g.tensors()) grads.push_back(t);

  AdamState adam;
  Rng train_rng = root.derive("baseline-train");

  auto val_loss = [&]() {
    double sum = 0.0;
    for (const auto& [user, label] : val) {
      sum += softmax_xent(model.logits(user), label, nullptr);
    }
    return sum / static_cast<double>(val.size());
  };

  // Best-validation snapshot.
  double best_val = 0.0;
  int best_epoch = -1;
  BaselineClassifier best = model;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    train_rng.shuffle(train);
    double epoch_sum = 0.0;

    for (std::size_t start = 0; start < train.size(); start += config.batch_size) {
      const std::size_t stop = std::min(train.size(), start + config.batch_size);
      head_w_g.setZero();
      head_b_g.setZero();
      for (auto* t : enc_g.tensors()) t->setZero();

      const double inv_batch = 1.0 / static_cast<double>(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        const auto [user, label] = train[i];
        Eigen::VectorXd enc;
        EncoderActivation act;
        if (fast_meanpool) {
          enc = model.encoder.proj * model.tokens.mean.row(user).transpose();
        } else {
          enc = encode_rows(model.words, model.encoder,
                            model.tokens.rows[static_cast<std::size_t>(user)], &act);
        }
        Eigen::Vector2d dlogits;
        epoch_sum += softmax_xent(model.head_w * enc + model.head_b.col(0), label, &dlogits);
        dlogits *= inv_batch;

        head_w_g.noalias() += dlogits * enc.transpose();
        head_b_g.col(0) += dlogits;
        const Eigen::VectorXd denc = model.head_w.transpose() * dlogits;
        if (fast_meanpool) {
          enc_g.proj.noalias() += denc * model.tokens.mean.row(user);
        } else {
          EncoderGrads g = encoder_backward(model.encoder, act, denc);
          enc_g.add_scaled(g, 1.0);
        }
      }
      adam_step(params, grads, adam, config.learning_rate);
    }

    result.train_losses.push_back(epoch_sum / static_cast<double>(train.size()));
    const double v = val_loss();
    result.val_losses.push_back(v);

    if (best_epoch < 0 || v < best_val) {
      best_val = v;
      best_epoch = epoch;
      best = model;
    } else if (epoch - best_epoch >= config.patience) {
      break;
    }
  }

  result.best_epoch = best_epoch;
  result.model = std::move(best);
  return result;
}

}  // namespace usergraph
