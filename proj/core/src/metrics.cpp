#include "usergraph/metrics.hpp"

#include <stdexcept>

namespace usergraph {

ConfusionMatrix ConfusionMatrix::from_labels(std::span<const int> gold,
                                             std::span<const int> pred) {
  if (gold.size() != pred.size()) {
    throw std::invalid_argument("confusion matrix: gold/pred length mismatch");
  }
  if (gold.empty()) {
    throw std::invalid_argument("confusion matrix: empty label lists");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] < 0 || gold[i] > 1 || pred[i] < 0 || pred[i] > 1) {
      throw std::invalid_argument("confusion matrix: labels must be 0 or 1");
    }
    ++cm.counts[gold[i]][pred[i]];
  }
  return cm;
}

long ConfusionMatrix::total() const {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

std::array<ClassScores, 2> per_class_scores(const ConfusionMatrix& cm) {
  std::array<ClassScores, 2> out;
  for (int c = 0; c < 2; ++c) {
    const double tp = static_cast<double>(cm.counts[c][c]);
    const double fp = static_cast<double>(cm.counts[1 - c][c]);
    const double fn = static_cast<double>(cm.counts[c][1 - c]);
    ClassScores& s = out[c];
    s.precision = (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
    s.recall = (tp + fn) > 0 ? tp / (tp + fn) : 0.0;
    s.f1 = (s.precision + s.recall) > 0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
  }
  return out;
}

double accuracy(const ConfusionMatrix& cm) {
  const long total = cm.total();
  if (total == 0) throw std::invalid_argument("accuracy: empty confusion matrix");
  return static_cast<double>(cm.correct()) / static_cast<double>(total);
}

double macro_f1(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("macro_f1: empty confusion matrix");
  const auto scores = per_class_scores(cm);
  return 0.5 * (scores[0].f1 + scores[1].f1);
}

double accuracy(std::span<const int> pred, std::span<const int> gold) {
  return accuracy(ConfusionMatrix::from_labels(gold, pred));
}

double macro_f1(std::span<const int> pred, std::span<const int> gold) {
  return macro_f1(ConfusionMatrix::from_labels(gold, pred));
}

}  // namespace usergraph
