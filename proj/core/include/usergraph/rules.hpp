#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "usergraph/corpus.hpp"
#include "usergraph/metrics.hpp"

namespace usergraph {

// One keyword rule: fires iff at least one trigger token is present, at
// least one require token is present (when the set is non-empty), and no
// exclude token is present. Matching is exact whole-token comparison.
struct Rule {
  int label = -1;  // index into RuleSet::labels
  std::vector<std::string> trigger_any;  // non-empty
  std::vector<std::string> require_any;
  std::vector<std::string> exclude_any;
};

struct RuleSet {
  std::array<std::string, kNumTypes> labels;
  std::vector<Rule> rules;
  std::string notes;  // free-form, round-tripped

  void validate() const;  // throws std::runtime_error on violated invariants
};

enum class MatchOutcome { NoMatch, Matched, Conflict };

struct RuleMatch {
  MatchOutcome outcome = MatchOutcome::NoMatch;
  int label = -1;       // valid when Matched
  int rule_index = -1;  // first matching rule, valid when Matched
};

// JSON schema:
//   {"labels": ["practitioner","promotional"],
//    "rules": [{"label": str, "trigger_any": [str],
//               "require_any": [str], "exclude_any": [str]}],
//    "notes": str (optional)}
RuleSet load_rules(const std::string& path);
RuleSet parse_rules(const std::string& json_text);
void save_rules(const RuleSet& rules, const std::string& path);
std::string rules_to_json(const RuleSet& rules);

// Description must already be preprocessed. Rules for both labels matching
// yields Conflict; insensitive to token order and multiplicity.
RuleMatch apply_rules(const RuleSet& rules, const TokenSeq& description);

struct WeakLabeling {
  std::map<std::string, int> labels;  // user_id -> type index
  double coverage = 0.0;              // |labels| / |corpus|
  int conflict_count = 0;

  std::optional<int> label_of(const std::string& user_id) const {
    auto it = labels.find(user_id);
    if (it == labels.end()) return std::nullopt;
    return it->second;
  }
};

WeakLabeling label_corpus(const RuleSet& rules, const Corpus& corpus);

struct QualityReport {
  int n_overlap = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

// Metrics over the users carrying both a weak and a gold label.
// Throws if that overlap is empty.
QualityReport assess_quality(const WeakLabeling& weak, const Corpus& corpus);

}  // namespace usergraph
