#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "usergraph/text.hpp"

namespace usergraph {

inline constexpr int kNumTypes = 2;

struct User {
  std::string user_id;
  std::string description_raw;          // never empty after ingestion
  std::vector<std::string> tweets_raw;
  std::vector<int> mentions;            // indices into Corpus::users; deduped, no self
  std::optional<int> gold_label;        // index into Corpus::type_names

  // Preprocessed on load/generation.
  TokenSeq description_tokens;
  std::vector<TokenSeq> tweet_tokens;   // parallel to tweets_raw
};

struct Corpus {
  std::vector<User> users;
  std::array<std::string, kNumTypes> type_names{"practitioner", "promotional"};

  // -1 if absent.
  int index_of(std::string_view user_id) const;
  int type_index(std::string_view name) const;  // -1 if not a type name

  void rebuild_index();

 private:
  std::unordered_map<std::string, int> id_to_index_;
};

struct LoadStats {
  int users_dropped_no_description = 0;
  int mentions_dropped_unknown = 0;
  int mentions_dropped_self_or_dup = 0;
};

// Reads a JSONL corpus: one object per line,
//   {"user_id": str, "description": str, "tweets": [str],
//    "mentions": [str], "gold_label": str|null}
// Users without a description are dropped (counted in stats). Mentions of
// unknown users are dropped with a warning count; self-mentions and
// duplicates are discarded. Malformed lines and duplicate user_ids raise
// with the offending line number / id.
Corpus load_corpus(const std::string& path, LoadStats* stats = nullptr,
                   const StopwordSet& stopwords = default_stopwords());

// Writes the same JSONL format (mentions serialized as user_id strings).
void save_corpus(const Corpus& corpus, const std::string& path);

// Throws std::runtime_error on any violated corpus invariant.
void validate_corpus(const Corpus& corpus);

}  // namespace usergraph
