#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "usergraph/corpus.hpp"

namespace usergraph {

// Pretrained (or synthesized) word-vector table. Row layout: one row per
// vocabulary token in insertion order, plus a trailing all-zero row that
// out-of-vocabulary tokens map to.
struct VocabEmbeddings {
  std::unordered_map<std::string, int> vocab;  // token -> row
  std::vector<std::string> tokens;             // row -> token
  Eigen::MatrixXd matrix;                      // (|vocab|+1) x dim
  int dim = 0;
  bool trainable = false;

  int oov_row() const { return static_cast<int>(matrix.rows()) - 1; }
  int row_of(std::string_view token) const {
    auto it = vocab.find(std::string(token));
    return it == vocab.end() ? oov_row() : it->second;
  }
  std::size_t size() const { return tokens.size(); }
};

// Text format: one line per token, "token v1 v2 ... v<dim>", space separated.
// Wrong value count or an unparsable number raises with the line number.
VocabEmbeddings load_word_vectors(const std::string& path, int dim);

// Deterministic stand-in for a pretrained table: the vocabulary is every
// tweet token in the corpus (sorted), and each token's vector is drawn from
// an RNG substream derived from the token itself, so a token always maps to
// the same vector regardless of the corpus it appears in.
VocabEmbeddings hashed_word_vectors(const Corpus& corpus, int dim, std::uint64_t seed);

}  // namespace usergraph
