#include "usergraph/rules.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace usergraph {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string lower_token(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

std::vector<std::string> read_token_array(const json& j, const std::string& key) {
  std::vector<std::string> out;
  if (!j.contains(key) || j[key].is_null()) return out;
  if (!j[key].is_array()) throw std::runtime_error("rule field \"" + key + "\" must be an array");
  for (const auto& t : j[key]) {
    if (!t.is_string()) throw std::runtime_error("rule field \"" + key + "\" must contain strings");
    std::string tok = lower_token(t.get<std::string>());
    if (tok.find(' ') != std::string::npos) {
      throw std::runtime_error("rule token \"" + tok + "\" contains whitespace");
    }
    out.push_back(std::move(tok));
  }
  return out;
}

}  // namespace

void RuleSet::validate() const {
  if (labels[0].empty() || labels[1].empty() || labels[0] == labels[1]) {
    throw std::runtime_error("rule set needs exactly two distinct labels");
  }
  std::array<int, kNumTypes> per_label{0, 0};
  for (const Rule& r : rules) {
    if (r.label < 0 || r.label >= kNumTypes) {
      throw std::runtime_error("rule references an unknown label");
    }
    if (r.trigger_any.empty()) {
      throw std::runtime_error("rule for label \"" + labels[r.label] +
                               "\" has an empty trigger_any set");
    }
    ++per_label[r.label];
  }
  for (int t = 0; t < kNumTypes; ++t) {
    if (per_label[t] == 0) {
      throw std::runtime_error("no rule for label \"" + labels[t] + "\"");
    }
  }
}

RuleSet parse_rules(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("rule file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("labels") || !j["labels"].is_array() ||
      j["labels"].size() != 2) {
    throw std::runtime_error("rule file must declare exactly two labels");
  }

  RuleSet rs;
  rs.labels = {j["labels"][0].get<std::string>(), j["labels"][1].get<std::string>()};
  if (j.contains("notes") && j["notes"].is_string()) rs.notes = j["notes"].get<std::string>();
  if (!j.contains("rules") || !j["rules"].is_array()) {
    throw std::runtime_error("rule file must contain a \"rules\" array");
  }
  for (const auto& rj : j["rules"]) {
    Rule r;
    if (!rj.contains("label") || !rj["label"].is_string()) {
      throw std::runtime_error("every rule needs a string \"label\"");
    }
    const std::string label_name = rj["label"].get<std::string>();
    if (label_name == rs.labels[0]) {
      r.label = 0;
    } else if (label_name == rs.labels[1]) {
      r.label = 1;
    } else {
      throw std::runtime_error("rule references unknown label \"" + label_name + "\"");
    }
    r.trigger_any = read_token_array(rj, "trigger_any");
    r.require_any = read_token_array(rj, "require_any");
    r.exclude_any = read_token_array(rj, "exclude_any");
    rs.rules.push_back(std::move(r));
  }
  rs.validate();
  return rs;
}

RuleSet load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rule file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_rules(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string rules_to_json(const RuleSet& rs) {
  ordered_json j;
  j["labels"] = {rs.labels[0], rs.labels[1]};
  if (!rs.notes.empty()) j["notes"] = rs.notes;
  j["rules"] = json::array();
  for (const Rule& r : rs.rules) {
    ordered_json rj;
    rj["label"] = rs.labels[r.label];
    rj["trigger_any"] = r.trigger_any;
    rj["require_any"] = r.require_any;
    rj["exclude_any"] = r.exclude_any;
    j["rules"].push_back(std::move(rj));
  }
  return j.dump(2);
}

void save_rules(const RuleSet& rules, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open rule file for writing: " + path);
  out << rules_to_json(rules) << '\n';
}

RuleMatch apply_rules(const RuleSet& rules, const TokenSeq& description) {
  std::unordered_set<std::string_view> tokens(description.begin(), description.end());
  auto any_in = [&](const std::vector<std::string>& set) {
    return std::any_of(set.begin(), set.end(),
                       [&](const std::string& t) { return tokens.contains(t); });
  };

  std::array<int, kNumTypes> first_match{-1, -1};
  for (int r = 0; r < static_cast<int>(rules.rules.size()); ++r) {
    const Rule& rule = rules.rules[r];
    if (first_match[rule.label] >= 0) continue;
    if (!any_in(rule.trigger_any)) continue;
    if (!rule.require_any.empty() && !any_in(rule.require_any)) continue;
    if (any_in(rule.exclude_any)) continue;
    first_match[rule.label] = r;
  }

  const bool m0 = first_match[0] >= 0;
  const bool m1 = first_match[1] >= 0;
  if (m0 && m1) return {MatchOutcome::Conflict, -1, -1};
  if (!m0 && !m1) return {MatchOutcome::NoMatch, -1, -1};
  const int label = m0 ? 0 : 1;
  return {MatchOutcome::Matched, label, first_match[label]};
}

WeakLabeling label_corpus(const RuleSet& rules, const Corpus& corpus) {
  WeakLabeling out;
  for (const User& u : corpus.users) {
    RuleMatch m = apply_rules(rules, u.description_tokens);
    if (m.outcome == MatchOutcome::Matched) {
      out.labels.emplace(u.user_id, m.label);
    } else if (m.outcome == MatchOutcome::Conflict) {
      ++out.conflict_count;
    }
  }
  out.coverage = corpus.users.empty()
                     ? 0.0
                     : static_cast<double>(out.labels.size()) / corpus.users.size();
  return out;
}

QualityReport assess_quality(const WeakLabeling& weak, const Corpus& corpus) {
  std::vector<int> gold, pred;
  for (const User& u : corpus.users) {
    if (!u.gold_label) continue;
    auto w = weak.label_of(u.user_id);
    if (!w) continue;
    gold.push_back(*u.gold_label);
    pred.push_back(*w);
  }
  if (gold.empty()) {
    throw std::runtime_error("no users carry both a weak and a gold label");
  }
  QualityReport q;
  q.n_overlap = static_cast<int>(gold.size());
  q.accuracy = accuracy(pred, gold);
  q.macro_f1 = macro_f1(pred, gold);
  return q;
}

}  // namespace usergraph
