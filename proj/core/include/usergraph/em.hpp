#pragma once

#include <optional>
#include <string>
#include <vector>

#include "usergraph/baseline.hpp"
#include "usergraph/graph.hpp"
#include "usergraph/rules.hpp"
#include "usergraph/trainer.hpp"

namespace usergraph {

enum class PredictionSource { Weak, Inferred, Final };

const char* to_string(PredictionSource s);

struct Prediction {
  std::string user_id;
  int label = -1;
  // Softmax margin |sigma_0 - sigma_1| over the two type dot products;
  // 0 on an exact tie (which resolves to the first declared type).
  double confidence = 0.0;
  PredictionSource source = PredictionSource::Inferred;
};

struct EmConfig {
  int k = 20;                    // promotions per iteration
  double churn_threshold = 0.10; // stop when label churn drops below this
  int ensemble_size = 3;
  int max_iterations = 10;
  bool cold_restart = false;     // default: warm-start each iteration
  TrainConfig train;

  void validate() const;
};

// Bundles the model-shape choices the pipeline threads through training.
struct ModelSetup {
  VocabEmbeddings words;
  EncoderVariant variant = EncoderVariant::MeanPool;
  int d = 300;
  int hidden = 150;
  int max_seq_len = 512;
};

// Scores every user against both type vectors by dot product; argmax with
// ties resolving to the first declared type.
std::vector<Prediction> predict_types(const EmbeddingSpace& space, const InfoGraph& graph,
                                      const Corpus& corpus);

struct Promotion {
  std::string user_id;
  int user_index = -1;
  int label = -1;
  int votes = 0;
  double mean_confidence = 0.0;
};

// Ensemble majority voting over users that have no type edge yet. Each
// member nominates its top-k unlabeled users by confidence; candidates are
// ranked by (votes, mean confidence, user_id) and the top k win a UserType
// plus a DescType edge to the voted type. When fewer than k unlabeled users
// remain, all of them are promoted.
std::vector<Promotion> infer_edges(const std::vector<std::vector<Prediction>>& ensemble,
                                   InfoGraph& graph, int k, const Corpus& corpus);

struct IterationRecord {
  int iteration = 0;  // 1-based
  std::vector<EpochLoss> loss_history;  // canonical (first) member
  std::vector<Promotion> promoted;
  std::optional<double> churn;  // defined from iteration 2 onward
  GraphStats stats_after;
};

struct EmRunReport {
  int iterations_run = 0;
  std::string stop_reason;  // "churn_below_threshold" or "max_iterations"
  GraphView view = GraphView::DesNet;
  std::vector<IterationRecord> iterations;
  std::vector<Prediction> final_predictions;  // all users, canonical member
  GraphStats final_stats;
};

// The outer loop: per iteration, train every ensemble member (distinct
// derived seeds; warm-started unless cold_restart), predict with the first
// member, check churn against the previous iteration (from iteration 2;
// stop before promoting when it falls below the threshold), then promote.
// The final iteration never promotes, so max_iterations=1 is a pure
// single-pass run. Weakly labeled users keep source=Weak in the output;
// everyone else is source=Final.
EmRunReport run_em(const Corpus& corpus, const WeakLabeling& weak, const EmConfig& config,
                   GraphView view, const ModelSetup& model);

// Like run_em but also returns the trained canonical space (for exports).
EmRunReport run_em(const Corpus& corpus, const WeakLabeling& weak, const EmConfig& config,
                   GraphView view, const ModelSetup& model,
                   EmbeddingSpace* canonical_space_out, InfoGraph* graph_out);

std::string em_report_to_json(const EmRunReport& report);
std::string promotions_to_csv(const EmRunReport& report);
std::string em_losses_to_csv(const EmRunReport& report);

}  // namespace usergraph
