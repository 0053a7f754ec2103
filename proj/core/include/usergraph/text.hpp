#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace usergraph {

// Ordered list of lowercase tokens. Tokens never contain whitespace,
// stopwords, URL remnants or emoji.
using TokenSeq = std::vector<std::string>;

using StopwordSet = std::unordered_set<std::string>;

// The list compiled in from data/stopwords.txt.
const StopwordSet& default_stopwords();

// Loads a one-token-per-line list ('#' comments and blank lines ignored).
StopwordSet load_stopwords(const std::string& path);

// Tokenizes raw text:
//  - ASCII lowercasing (non-ASCII letters pass through unchanged),
//  - http:// and https:// URLs and bare t.co/ shortlinks stripped,
//  - emoticons (":)", ":D", "<3", ...) and emoji codepoints stripped,
//  - split on whitespace and punctuation,
//  - stopword tokens dropped.
// Empty input yields an empty sequence. Idempotent over its own output:
// preprocess(join(preprocess(x))) == preprocess(x).
TokenSeq preprocess_text(std::string_view raw, const StopwordSet& stopwords);

inline TokenSeq preprocess_text(std::string_view raw) {
  return preprocess_text(raw, default_stopwords());
}

// Space-joins tokens; inverse direction of the tokenizer for idempotence
// checks and synthetic text assembly.
std::string join_tokens(const TokenSeq& tokens);

}  // namespace usergraph
