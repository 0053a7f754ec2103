#include "usergraph/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace usergraph {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

int Corpus::index_of(std::string_view user_id) const {
  auto it = id_to_index_.find(std::string(user_id));
  return it == id_to_index_.end() ? -1 : it->second;
}

int Corpus::type_index(std::string_view name) const {
  for (int t = 0; t < kNumTypes; ++t) {
    if (type_names[t] == name) return t;
  }
  return -1;
}

void Corpus::rebuild_index() {
  id_to_index_.clear();
  id_to_index_.reserve(users.size());
  for (int i = 0; i < static_cast<int>(users.size()); ++i) {
    auto [it, inserted] = id_to_index_.emplace(users[i].user_id, i);
    if (!inserted) {
      throw std::runtime_error("duplicate user_id: " + users[i].user_id);
    }
  }
}

namespace {

struct RawUser {
  std::string user_id;
  std::string description;
  std::vector<std::string> tweets;
  std::vector<std::string> mentions;
  std::optional<std::string> gold_label;
};

RawUser parse_line(const std::string& line, int line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw std::runtime_error("corpus line " + std::to_string(line_no) +
                             ": invalid JSON (" + e.what() + ")");
  }
  auto fail = [&](const std::string& what) -> std::runtime_error {
    return std::runtime_error("corpus line " + std::to_string(line_no) + ": " + what);
  };
  if (!j.is_object()) throw fail("expected an object");
  if (!j.contains("user_id") || !j["user_id"].is_string()) {
    throw fail("missing or non-string \"user_id\"");
  }

  RawUser u;
  u.user_id = j["user_id"].get<std::string>();
  if (u.user_id.empty()) throw fail("empty \"user_id\"");
  if (j.contains("description") && !j["description"].is_null()) {
    if (!j["description"].is_string()) throw fail("\"description\" must be a string");
    u.description = j["description"].get<std::string>();
  }
  if (j.contains("tweets") && !j["tweets"].is_null()) {
    if (!j["tweets"].is_array()) throw fail("\"tweets\" must be an array");
    for (const auto& t : j["tweets"]) {
      if (!t.is_string()) throw fail("\"tweets\" entries must be strings");
      u.tweets.push_back(t.get<std::string>());
    }
  }
  if (j.contains("mentions") && !j["mentions"].is_null()) {
    if (!j["mentions"].is_array()) throw fail("\"mentions\" must be an array");
    for (const auto& m : j["mentions"]) {
      if (!m.is_string()) throw fail("\"mentions\" entries must be strings");
      u.mentions.push_back(m.get<std::string>());
    }
  }
  if (j.contains("gold_label") && !j["gold_label"].is_null()) {
    if (!j["gold_label"].is_string()) throw fail("\"gold_label\" must be a string or null");
    u.gold_label = j["gold_label"].get<std::string>();
  }
  return u;
}

}  // namespace

Corpus load_corpus(const std::string& path, LoadStats* stats,
                   const StopwordSet& stopwords) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);

  LoadStats local;
  Corpus corpus;
  std::vector<RawUser> raw;
  std::set<std::string> seen_ids;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    RawUser u = parse_line(line, line_no);
    if (!seen_ids.insert(u.user_id).second) {
      throw std::runtime_error("duplicate user_id: " + u.user_id +
                               " (corpus line " + std::to_string(line_no) + ")");
    }
    if (u.gold_label && corpus.type_index(*u.gold_label) < 0) {
      throw std::runtime_error("corpus line " + std::to_string(line_no) +
                               ": unknown gold_label \"" + *u.gold_label + "\"");
    }
    if (u.description.empty()) {
      ++local.users_dropped_no_description;
      continue;
    }
    raw.push_back(std::move(u));
  }

  corpus.users.reserve(raw.size());
  for (const RawUser& r : raw) {
    User u;
    u.user_id = r.user_id;
    u.description_raw = r.description;
    u.tweets_raw = r.tweets;
    if (r.gold_label) u.gold_label = corpus.type_index(*r.gold_label);
    u.description_tokens = preprocess_text(u.description_raw, stopwords);
    u.tweet_tokens.reserve(u.tweets_raw.size());
    for (const auto& t : u.tweets_raw) u.tweet_tokens.push_back(preprocess_text(t, stopwords));
    corpus.users.push_back(std::move(u));
  }
  corpus.rebuild_index();

  // Resolve mentions once all surviving users are known.
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::set<int> resolved;
    for (const std::string& m : raw[i].mentions) {
      int j = corpus.index_of(m);
      if (j < 0) {
        ++local.mentions_dropped_unknown;
        continue;
      }
      if (j == static_cast<int>(i) || !resolved.insert(j).second) {
        ++local.mentions_dropped_self_or_dup;
      }
    }
    resolved.erase(static_cast<int>(i));
    corpus.users[i].mentions.assign(resolved.begin(), resolved.end());
  }

  validate_corpus(corpus);
  if (stats) *stats = local;
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open corpus file for writing: " + path);
  for (const User& u : corpus.users) {
    ordered_json j;
    j["user_id"] = u.user_id;
    j["description"] = u.description_raw;
    j["tweets"] = u.tweets_raw;
    json mentions = json::array();
    for (int m : u.mentions) mentions.push_back(corpus.users[m].user_id);
    j["mentions"] = mentions;
    if (u.gold_label) {
      j["gold_label"] = corpus.type_names[*u.gold_label];
    } else {
      j["gold_label"] = nullptr;
    }
    out << j.dump() << '\n';
  }
}

void validate_corpus(const Corpus& corpus) {
  if (corpus.users.size() < 2) {
    throw std::runtime_error("corpus must contain at least 2 users, has " +
                             std::to_string(corpus.users.size()));
  }
  if (corpus.type_names[0].empty() || corpus.type_names[1].empty() ||
      corpus.type_names[0] == corpus.type_names[1]) {
    throw std::runtime_error("corpus needs exactly two distinct type names");
  }
  const int n = static_cast<int>(corpus.users.size());
  for (int i = 0; i < n; ++i) {
    const User& u = corpus.users[i];
    if (u.description_raw.empty()) {
      throw std::runtime_error("user " + u.user_id + " has an empty description");
    }
    if (corpus.index_of(u.user_id) != i) {
      throw std::runtime_error("corpus index out of sync for user " + u.user_id);
    }
    if (u.gold_label && (*u.gold_label < 0 || *u.gold_label >= kNumTypes)) {
      throw std::runtime_error("user " + u.user_id + " has an invalid gold label");
    }
    for (int m : u.mentions) {
      if (m < 0 || m >= n || m == i) {
        throw std::runtime_error("user " + u.user_id + " has an invalid mention index");
      }
    }
  }
}

}  // namespace usergraph
