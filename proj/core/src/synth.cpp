#include "usergraph/synth.hpp"

#include <algorithm>
#include <stdexcept>

#include "usergraph/rng.hpp"

namespace usergraph {
namespace {

constexpr int kMentionSlotsPerUser = 2;

std::string type_token(int type, int j) {
  return (type == 0 ? "pracw" : "promow") + std::to_string(j);
}

std::string shared_token(int j) { return "sharedw" + std::to_string(j); }

std::string padded_id(int i, int width) {
  std::string digits = std::to_string(i);
  return "u" + std::string(std::max(0, width - static_cast<int>(digits.size())), '0') + digits;
}

}  // namespace

void validate(const SynthParams& p) {
  auto prob = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument(std::string("synth: ") + name + " must be in [0,1]");
    }
  };
  prob(p.separation, "separation");
  prob(p.desc_keyword_coverage, "desc_keyword_coverage");
  prob(p.homophily, "homophily");
  auto count = [](int v, const char* name) {
    if (v <= 0) {
      throw std::invalid_argument(std::string("synth: ") + name + " must be positive");
    }
  };
  count(p.n_users, "n_users");
  count(p.vocab_size_per_type, "vocab_size_per_type");
  count(p.shared_vocab_size, "shared_vocab_size");
  count(p.tweets_per_user, "tweets_per_user");
  count(p.tokens_per_tweet, "tokens_per_tweet");
  if (p.n_users < 2) throw std::invalid_argument("synth: n_users must be at least 2");
}

Corpus generate_synthetic(const SynthParams& p) {
  validate(p);
  Rng rng = Rng(p.seed).derive("synth");

  const int id_width = static_cast<int>(std::to_string(p.n_users - 1).size());
  Corpus corpus;
  corpus.users.resize(p.n_users);

  // Types first: mention sampling needs the full assignment.
  std::vector<int> gold(p.n_users);
  std::array<std::vector<int>, kNumTypes> by_type;
  for (int i = 0; i < p.n_users; ++i) {
    gold[i] = static_cast<int>(rng.next_below(kNumTypes));
    by_type[gold[i]].push_back(i);
  }

  for (int i = 0; i < p.n_users; ++i) {
    User& u = corpus.users[i];
    u.user_id = padded_id(i, id_width);
    u.gold_label = gold[i];

    TokenSeq desc;
    if (rng.next_bernoulli(p.desc_keyword_coverage)) {
      desc.emplace_back(kSynthTypeTags[gold[i]]);
    }
    for (int f = 0; f < 3; ++f) {
      desc.push_back(shared_token(static_cast<int>(rng.next_below(p.shared_vocab_size))));
    }
    u.description_raw = join_tokens(desc);

    for (int t = 0; t < p.tweets_per_user; ++t) {
      TokenSeq tweet;
      tweet.reserve(p.tokens_per_tweet);
      for (int w = 0; w < p.tokens_per_tweet; ++w) {
        if (rng.next_bernoulli(p.separation)) {
          tweet.push_back(type_token(gold[i], static_cast<int>(rng.next_below(p.vocab_size_per_type))));
        } else {
          tweet.push_back(shared_token(static_cast<int>(rng.next_below(p.shared_vocab_size))));
        }
      }
      u.tweets_raw.push_back(join_tokens(tweet));
    }
  }

  // Mention slots; homophily decides whether a slot targets a same-type user.
  for (int i = 0; i < p.n_users; ++i) {
    std::vector<int> targets;
    for (int s = 0; s < kMentionSlotsPerUser; ++s) {
      const bool same = rng.next_bernoulli(p.homophily);
      const int want_type = same ? gold[i] : 1 - gold[i];
      const auto& pool = by_type[want_type];
      // Exclude self from the candidate pool.
      const int pool_size = static_cast<int>(pool.size()) - (want_type == gold[i] ? 1 : 0);
      if (pool_size <= 0) continue;
      int pick = static_cast<int>(rng.next_below(pool_size));
      int target = pool[pick];
      if (want_type == gold[i] && target >= i) target = pool[pick + 1];
      targets.push_back(target);
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    corpus.users[i].mentions = std::move(targets);
  }

  // Preprocess through the standard pipeline so corpus invariants hold.
  for (User& u : corpus.users) {
    u.description_tokens = preprocess_text(u.description_raw);
    for (const auto& t : u.tweets_raw) u.tweet_tokens.push_back(preprocess_text(t));
  }
  corpus.rebuild_index();
  validate_corpus(corpus);
  return corpus;
}

}  // namespace usergraph
