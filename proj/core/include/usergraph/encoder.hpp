#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "usergraph/rng.hpp"
#include "usergraph/text.hpp"
#include "usergraph/word_vectors.hpp"

namespace usergraph {

enum class EncoderVariant { MeanPool, BiLstm };

const char* to_string(EncoderVariant v);
EncoderVariant encoder_variant_from_string(const std::string& s);

// One LSTM direction. Gates are packed row-wise in the order
// [input; forget; cell; output], H rows each.
struct LstmDirection {
  Eigen::MatrixXd wx;  // 4H x word_dim
  Eigen::MatrixXd wh;  // 4H x H
  Eigen::MatrixXd b;   // 4H x 1
};

// Text encoder mapping a user's concatenated tweet tokens to a d-vector.
//  - MeanPool: out = proj * mean(word vectors).
//  - BiLstm:   per-step concatenation of the two directions' hidden states
//              (2H = d), averaged over steps.
// Zero tokens encode to the zero vector.
struct EncoderParams {
  EncoderVariant variant = EncoderVariant::MeanPool;
  int d = 300;
  int word_dim = 300;
  int hidden = 150;       // BiLstm only; d == 2 * hidden
  int max_seq_len = 512;  // tail-truncation bound for BPTT cost

  Eigen::MatrixXd proj;   // MeanPool: d x word_dim
  LstmDirection fwd, bwd;

  // Weights uniform in [-0.08, 0.08]; LSTM forget-gate biases start at 1.
  static EncoderParams mean_pool(int d, int word_dim, Rng& rng);
  static EncoderParams bilstm(int hidden, int word_dim, Rng& rng);

  // Trainable tensors in a fixed order (for the optimizer and checkpoints).
  std::vector<Eigen::MatrixXd*> tensors();
  std::vector<const Eigen::MatrixXd*> tensors() const;

  void validate() const;
};

// Backward-pass cache produced by the forward pass.
struct EncoderActivation {
  int steps = 0;
  std::vector<int> rows;  // word-vector row per step
  Eigen::MatrixXd x;      // inputs, word_dim x steps

  Eigen::VectorXd xbar;   // MeanPool: mean input

  struct DirCache {
    // Each H x steps, in processing order (bwd direction stores the
    // reversed sequence's order).
    Eigen::MatrixXd i, f, g, o, c, h;
  };
  DirCache fwd, bwd;
};

struct EncoderGrads {
  Eigen::MatrixXd proj;
  LstmDirection fwd, bwd;
  // Word-vector gradients by row index; duplicate tokens accumulate.
  std::unordered_map<int, Eigen::VectorXd> word_grads;

  static EncoderGrads zero_like(const EncoderParams& params);
  // Order matches EncoderParams::tensors().
  std::vector<Eigen::MatrixXd*> tensors();
  std::vector<const Eigen::MatrixXd*> tensors() const;
  void add_scaled(const EncoderGrads& other, double scale);
};

// Forward pass over explicit word-vector rows.
Eigen::VectorXd encode_rows(const VocabEmbeddings& vocab, const EncoderParams& params,
                            const std::vector<int>& rows, EncoderActivation* activation);

// Concatenates the user's tweets in corpus order, truncates to max_seq_len,
// and encodes. Returns the encoding; fills *activation when non-null.
Eigen::VectorXd encode_user(const VocabEmbeddings& vocab, const EncoderParams& params,
                            const std::vector<TokenSeq>& tweets,
                            EncoderActivation* activation = nullptr);

// Exact gradients of (grad_out . encoder_output) with respect to every
// parameter and every input word vector, by backpropagation through time.
// The activation must come from a forward pass under the same params.
EncoderGrads encoder_backward(const EncoderParams& params,
                              const EncoderActivation& activation,
                              const Eigen::VectorXd& grad_out);

}  // namespace usergraph
