#pragma once

#include <vector>

#include <Eigen/Core>

#include "usergraph/rules.hpp"
#include "usergraph/trainer.hpp"

namespace usergraph {

// Sequence classifier: the shared text encoder followed by a 2-way softmax
// head, trained with cross-entropy on weakly labeled users only.
struct BaselineClassifier {
  EncoderParams encoder;
  VocabEmbeddings words;
  UserTokenTable tokens;
  Eigen::MatrixXd head_w;  // kNumTypes x d
  Eigen::MatrixXd head_b;  // kNumTypes x 1

  Eigen::Vector2d logits(int user) const;
  int predict(int user) const;  // argmax; tie resolves to type 0
};

struct BaselineResult {
  BaselineClassifier model;
  std::vector<double> train_losses;  // per epoch
  std::vector<double> val_losses;
  int best_epoch = -1;  // epoch whose validation loss was lowest
  int n_train = 0;
  int n_val = 0;
};

// Trains on the weakly labeled subset with a seeded 20% validation split
// (floor(0.2 * n), at least 1). Runs up to config.max_epochs, stops
// `patience` epochs past the best validation loss, and returns the
// parameters snapshotted at that best epoch.
// Throws when fewer than 5 users carry weak labels.
BaselineResult train_supervised_baseline(const Corpus& corpus, const WeakLabeling& weak,
                                         const TrainConfig& config,
                                         VocabEmbeddings words, EncoderVariant variant,
                                         int d, int hidden, int max_seq_len = 512);

}  // namespace usergraph
