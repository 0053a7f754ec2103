#include "usergraph/word_vectors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "usergraph/rng.hpp"

namespace usergraph {

VocabEmbeddings load_word_vectors(const std::string& path, int dim) {
  if (dim <= 0) throw std::invalid_argument("word vectors: dim must be positive");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open word vector file: " + path);

  VocabEmbeddings v;
  v.dim = dim;
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    auto fail = [&](const std::string& what) -> std::runtime_error {
      return std::runtime_error(path + " line " + std::to_string(line_no) + ": " + what);
    };

    std::size_t pos = line.find(' ');
    if (pos == std::string::npos || pos == 0) throw fail("expected \"token v1 ... v" + std::to_string(dim) + "\"");
    std::string token = line.substr(0, pos);
    if (v.vocab.contains(token)) throw fail("duplicate token \"" + token + "\"");

    int count = 0;
    const char* p = line.data() + pos;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double value = 0.0;
      auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc()) throw fail("unparsable number");
      if (!std::isfinite(value)) throw fail("non-finite value");
      values.push_back(value);
      p = next;
      ++count;
    }
    if (count != dim) {
      throw fail("expected " + std::to_string(dim) + " values, found " + std::to_string(count));
    }
    v.vocab.emplace(token, static_cast<int>(v.tokens.size()));
    v.tokens.push_back(std::move(token));
  }

  const int n = static_cast<int>(v.tokens.size());
  v.matrix = Eigen::MatrixXd::Zero(n + 1, dim);  // last row: OOV, zeros
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < dim; ++c) v.matrix(r, c) = values[static_cast<std::size_t>(r) * dim + c];
  }
  return v;
}

VocabEmbeddings hashed_word_vectors(const Corpus& corpus, int dim, std::uint64_t seed) {
  if (dim <= 0) throw std::invalid_argument("word vectors: dim must be positive");
  std::set<std::string> tokens;
  for (const User& u : corpus.users) {
    for (const TokenSeq& tweet : u.tweet_tokens) {
      tokens.insert(tweet.begin(), tweet.end());
    }
  }

  VocabEmbeddings v;
  v.dim = dim;
  v.matrix = Eigen::MatrixXd::Zero(static_cast<int>(tokens.size()) + 1, dim);
  const Rng base(seed);
  int row = 0;
  for (const std::string& token : tokens) {
    Rng token_rng = base.derive(token);
    for (int c = 0; c < dim; ++c) v.matrix(row, c) = token_rng.next_range(-0.5, 0.5);
    v.vocab.emplace(token, row);
    v.tokens.push_back(token);
    ++row;
  }
  return v;
}

}  // namespace usergraph
