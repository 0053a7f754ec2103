#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "usergraph/adam.hpp"
#include "usergraph/encoder.hpp"
#include "usergraph/graph.hpp"
#include "usergraph/rng.hpp"
#include "usergraph/word_vectors.hpp"

namespace usergraph {

struct TrainConfig {
  // lambda per EdgeKind, indexed by static_cast<int>(EdgeKind).
  std::array<double, kNumEdgeKinds> objective_weights{1.0, 1.0, 1.0, 1.0};
  int negatives_per_positive = 5;
  double learning_rate = 0.001;
  int batch_size = 16;
  int max_epochs = 100;
  int patience = 10;
  std::uint64_t seed = 1;
  bool train_word_vectors = false;

  void validate() const;
};

// Cross-entropy ranking loss of a positive score against one negative score:
// -log(e^{s_p} / (e^{s_p} + e^{s_n})), evaluated as log1p(e^{s_n - s_p}) so
// large scores cannot overflow.
double pair_loss(double s_pos, double s_neg);

// Uniform-with-replacement sample of n nodes of the positive's kind that
// are not adjacent to the anchor (the anchor itself is excluded). Returns
// an empty list when no candidate exists.
std::vector<NodeId> sample_negatives(const InfoGraph& graph, NodeId anchor,
                                     NodeId positive, int n, Rng& rng);

// Word-vector rows (tweets concatenated in corpus order, tail-truncated)
// plus each user's mean word vector, precomputed once per corpus/vocab.
struct UserTokenTable {
  std::vector<std::vector<int>> rows;
  Eigen::MatrixXd mean;  // n x word_dim; zero row for tokenless users

  static UserTokenTable build(const Corpus& corpus, const VocabEmbeddings& vocab,
                              int max_seq_len);
};

// The embedding function over graph nodes: description and type nodes own
// free trainable vectors; user nodes are encoded from their tweets on
// demand (so encoder updates move every user).
struct EmbeddingSpace {
  int d = 0;
  Eigen::MatrixXd desc_vectors;  // n x d
  Eigen::MatrixXd type_vectors;  // kNumTypes x d
  EncoderParams encoder;
  VocabEmbeddings words;
  UserTokenTable tokens;

  // Free vectors uniform in [-0.5/d, 0.5/d]; encoder per its own init.
  static EmbeddingSpace init(const Corpus& corpus, VocabEmbeddings words,
                             EncoderVariant variant, int d, int hidden, Rng& rng,
                             int max_seq_len = 512);

  Eigen::VectorXd user_vector(int user) const;
  Eigen::VectorXd node_vector(NodeId n) const;
  Eigen::MatrixXd all_user_vectors() const;  // n x d
  void validate() const;
};

struct EpochLoss {
  double total = 0.0;                           // sum_t lambda_t * E_t
  std::array<double, kNumEdgeKinds> by_kind{};  // E_t: mean pair loss per kind
  std::array<int, kNumEdgeKinds> pairs_by_kind{};
};

struct TrainResult {
  std::vector<EpochLoss> history;
  int best_epoch = -1;  // index of the running-minimum epoch loss
};

// Joint embedding training. Every edge yields one positive pair (anchored
// at the user for desc_user edges, at the non-type endpoint for type edges,
// at the lower-indexed user for user_user edges); each pair draws
// negatives_per_positive negatives and contributes the mean pair loss,
// weighted by its kind's lambda. Pairs are reshuffled per epoch, batched,
// and optimized with Adam. Edge kinds with lambda 0 are skipped entirely.
// Stops at max_epochs or `patience` epochs past the best epoch loss.
// Throws when the graph has no edges.
TrainResult train_embeddings(EmbeddingSpace& space, const InfoGraph& graph,
                             const TrainConfig& config);

// Single evaluation pass: fresh negatives from rng for every edge
// (independent of the lambdas), per-kind means, returns sum_t lambda_t E_t.
double total_loss(const EmbeddingSpace& space, const InfoGraph& graph,
                  const TrainConfig& config, Rng& rng);

// Gradient sink shaped like the trainable tensors of an EmbeddingSpace.
struct SpaceGrads {
  Eigen::MatrixXd desc;   // n x d
  Eigen::MatrixXd type;   // kNumTypes x d
  EncoderGrads encoder;
  Eigen::MatrixXd words;  // empty unless the word table is trainable

  static SpaceGrads zero_like(const EmbeddingSpace& space);
};

// One full pass over every (lambda > 0) pair as a single batch: returns the
// mean lambda-weighted pair loss and fills `grads` with its exact gradient.
// This is the same accumulation the training batches run, exposed so the
// end-to-end gradients can be checked against finite differences.
double pass_loss_and_gradients(const EmbeddingSpace& space, const InfoGraph& graph,
                               const TrainConfig& config, Rng& rng, SpaceGrads& grads);

// "epoch,total,desc_type,user_type,desc_user,user_user" per line.
std::string loss_history_to_csv(const std::vector<EpochLoss>& history);

std::string checkpoint_to_json(const EmbeddingSpace& space);
EmbeddingSpace checkpoint_from_json(const std::string& text, const Corpus& corpus);

}  // namespace usergraph
