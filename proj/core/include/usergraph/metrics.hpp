#pragma once

#include <array>
#include <span>
#include <string>

namespace usergraph {

// 2x2 confusion counts indexed [gold][predicted].
struct ConfusionMatrix {
  std::array<std::array<long, 2>, 2> counts{{{0, 0}, {0, 0}}};

  static ConfusionMatrix from_labels(std::span<const int> gold, std::span<const int> pred);
  long total() const;
  long correct() const { return counts[0][0] + counts[1][1]; }
};

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// 0/0 precision, recall or F1 is defined as 0.
std::array<ClassScores, 2> per_class_scores(const ConfusionMatrix& cm);

double accuracy(const ConfusionMatrix& cm);
double macro_f1(const ConfusionMatrix& cm);

// List forms; lists must be aligned and non-empty (throws otherwise).
double accuracy(std::span<const int> pred, std::span<const int> gold);
double macro_f1(std::span<const int> pred, std::span<const int> gold);

struct EvalReport {
  int n_eval = 0;
  int n_weak_overlap = 0;  // evaluated users that also carry a weak label
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::array<ClassScores, 2> per_class{};
  ConfusionMatrix confusion;
  std::string config_fingerprint;
};

}  // namespace usergraph
