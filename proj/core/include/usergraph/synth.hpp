#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "usergraph/corpus.hpp"

namespace usergraph {

// Parameters for the synthetic two-type corpus generator. Tokens come from
// three disjoint alphanumeric vocabularies (one per type plus a shared pool)
// so the generated text survives preprocessing unchanged.
struct SynthParams {
  int n_users = 200;
  int vocab_size_per_type = 50;
  int shared_vocab_size = 50;
  // Probability a tweet token is drawn from the user's type vocabulary
  // rather than the shared one.
  double separation = 0.9;
  // Fraction of users whose description embeds the type-tag keyword the
  // shipped synthetic rule file fires on (Bernoulli per user).
  double desc_keyword_coverage = 0.3;
  // Probability a mention targets a same-type user.
  double homophily = 0.9;
  int tweets_per_user = 5;
  int tokens_per_tweet = 8;
  std::uint64_t seed = 1;
};

// Description keywords matched by data/rules/synthetic.json, per type.
inline constexpr std::array<std::string_view, kNumTypes> kSynthTypeTags = {
    "praclife", "promolife"};

// Throws std::invalid_argument on out-of-range probabilities or
// non-positive counts.
void validate(const SynthParams& params);

// Deterministic for a fixed parameter set (including seed). Every user gets
// a uniform gold type, `tweets_per_user` tweets, two attempted mention
// slots, and a description that contains the type tag with probability
// `desc_keyword_coverage` (and never a rule-matching keyword otherwise).
Corpus generate_synthetic(const SynthParams& params);

}  // namespace usergraph
