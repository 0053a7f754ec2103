#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "usergraph/em.hpp"
#include "usergraph/encoder.hpp"
#include "usergraph/graph.hpp"
#include "usergraph/trainer.hpp"

namespace usergraph {

// File-based pipeline configuration. All stage randomness derives from the
// single top-level seed (see stage_seed); the per-stage seeds inside
// TrainConfig are filled in at dispatch time, never read from the file.
struct RunConfig {
  std::uint64_t seed = 1;

  std::string corpus_path;
  std::string rules_path;
  std::string word_vectors_path;  // empty: deterministic hashed vectors
  std::string stopwords_path;     // empty: built-in list
  std::string out_dir = "out";

  GraphView view = GraphView::DesNet;
  EncoderVariant encoder = EncoderVariant::MeanPool;
  int d = 300;
  int hidden = 150;
  int word_dim = 300;
  int max_seq_len = 512;

  TrainConfig train;

  // EM loop settings (assembled into EmConfig together with `train`).
  int em_k = 20;
  double em_churn_threshold = 0.10;
  int em_ensemble_size = 3;
  int em_max_iterations = 10;
  bool em_cold_restart = false;

  bool eval_include_weak_labeled = true;

  EmConfig em_config() const;
  void validate() const;
};

RunConfig default_config();

std::string run_config_to_json(const RunConfig& config);
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
void save_run_config(const RunConfig& config, const std::string& path);

// FNV-1a hex digest of the serialized config; stamped into reports.
std::string config_fingerprint(const RunConfig& config);

// seed for a named pipeline stage, derived from the top-level seed.
std::uint64_t stage_seed(std::uint64_t seed, std::string_view stage);

// Reproducibility record written beside every subcommand's outputs: tool
// version, command, resolved config, extra input files, output list.
// Deliberately timestamp-free so identical runs write identical manifests.
void write_manifest(const std::string& path, const std::string& command,
                    const RunConfig& config, const std::vector<std::string>& outputs,
                    const std::vector<std::string>& extra_inputs = {});

}  // namespace usergraph
