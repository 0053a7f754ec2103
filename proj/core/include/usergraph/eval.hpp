#pragma once

#include <string>
#include <vector>

#include "usergraph/em.hpp"
#include "usergraph/metrics.hpp"

namespace usergraph {

struct EvalOptions {
  // The holdout may overlap the weakly labeled set; by default overlapping
  // users stay in (the overlap size is reported). Excluding them requires
  // `weak`.
  bool include_weak_labeled = true;
  const WeakLabeling* weak = nullptr;
  std::string config_fingerprint;
};

// Metrics over gold-labeled users only. Throws when no gold user is
// evaluable or a gold user lacks a prediction.
EvalReport evaluate(const std::vector<Prediction>& predictions, const Corpus& corpus,
                    const EvalOptions& options = {});

struct AblationRow {
  std::string model;  // "label_propagation" (single pass) or "em_style"
  GraphView view = GraphView::DesNet;
  EvalReport report;
};

// Six rows: {label_propagation, em_style} x {des, net, desnet}.
// label_propagation = the same pipeline capped at one training round with
// no promotion.
std::vector<AblationRow> run_ablation(const Corpus& corpus, const WeakLabeling& weak,
                                      const EmConfig& config, const ModelSetup& model,
                                      const EvalOptions& options = {});

std::string ablation_to_csv(const std::vector<AblationRow>& rows);
std::string eval_report_to_json(const EvalReport& report);

// CSV of every node's vector: node_id, kind, gold_label, predicted_label,
// then the d components. User rows carry gold (if any) and predicted
// labels; type rows carry their own name in both label columns; desc rows
// carry their user's labels.
void export_embeddings(const EmbeddingSpace& space, const InfoGraph& graph,
                       const Corpus& corpus, const std::string& path);

}  // namespace usergraph
