#include "usergraph/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace usergraph {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {
constexpr const char* kToolVersion = "0.1.0";
}

EmConfig RunConfig::em_config() const {
  EmConfig c;
  c.k = em_k;
  c.churn_threshold = em_churn_threshold;
  c.ensemble_size = em_ensemble_size;
  c.max_iterations = em_max_iterations;
  c.cold_restart = em_cold_restart;
  c.train = train;
  return c;
}

void RunConfig::validate() const {
  train.validate();
  em_config().validate();
  if (d <= 0 || word_dim <= 0 || max_seq_len <= 0) {
    throw std::invalid_argument("config: dims must be positive");
  }
  if (encoder == EncoderVariant::BiLstm && d != 2 * hidden) {
    throw std::invalid_argument("config: bilstm requires d == 2*hidden");
  }
}

RunConfig default_config() { return RunConfig{}; }

std::string run_config_to_json(const RunConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["corpus"] = c.corpus_path;
  j["rules"] = c.rules_path;
  j["word_vectors"] = c.word_vectors_path.empty() ? json(nullptr) : json(c.word_vectors_path);
  j["stopwords"] = c.stopwords_path.empty() ? json(nullptr) : json(c.stopwords_path);
  j["out_dir"] = c.out_dir;
  j["view"] = to_string(c.view);
  j["encoder"] = to_string(c.encoder);
  j["d"] = c.d;
  j["hidden"] = c.hidden;
  j["word_dim"] = c.word_dim;
  j["max_seq_len"] = c.max_seq_len;

  ordered_json tj;
  ordered_json weights;
  for (int k = 0; k < kNumEdgeKinds; ++k) {
    weights[to_string(static_cast<EdgeKind>(k))] = c.train.objective_weights[k];
  }
  tj["objective_weights"] = std::move(weights);
  tj["negatives_per_positive"] = c.train.negatives_per_positive;
  tj["learning_rate"] = c.train.learning_rate;
  tj["batch_size"] = c.train.batch_size;
  tj["max_epochs"] = c.train.max_epochs;
  tj["patience"] = c.train.patience;
  tj["train_word_vectors"] = c.train.train_word_vectors;
  j["train"] = std::move(tj);

  ordered_json ej;
  ej["k"] = c.em_k;
  ej["churn_threshold"] = c.em_churn_threshold;
  ej["ensemble_size"] = c.em_ensemble_size;
  ej["max_iterations"] = c.em_max_iterations;
  ej["cold_restart"] = c.em_cold_restart;
  j["em"] = std::move(ej);

  ordered_json vj;
  vj["include_weak_labeled"] = c.eval_include_weak_labeled;
  j["eval"] = std::move(vj);
  return j.dump(2);
}

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.contains("seed")) throw std::runtime_error("config: \"seed\" is mandatory");

  RunConfig c;
  c.seed = j["seed"].get<std::uint64_t>();
  auto str_or = [&](const char* key, const std::string& fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    return j[key].get<std::string>();
  };
  c.corpus_path = str_or("corpus", "");
  c.rules_path = str_or("rules", "");
  c.word_vectors_path = str_or("word_vectors", "");
  c.stopwords_path = str_or("stopwords", "");
  c.out_dir = str_or("out_dir", c.out_dir);
  c.view = view_from_string(str_or("view", to_string(c.view)));
  c.encoder = encoder_variant_from_string(str_or("encoder", to_string(c.encoder)));
  if (j.contains("d")) c.d = j["d"].get<int>();
  if (j.contains("hidden")) c.hidden = j["hidden"].get<int>();
  if (j.contains("word_dim")) c.word_dim = j["word_dim"].get<int>();
  if (j.contains("max_seq_len")) c.max_seq_len = j["max_seq_len"].get<int>();

  if (j.contains("train")) {
    const json& tj = j["train"];
    if (tj.contains("objective_weights")) {
      for (int k = 0; k < kNumEdgeKinds; ++k) {
        const char* name = to_string(static_cast<EdgeKind>(k));
        if (tj["objective_weights"].contains(name)) {
          c.train.objective_weights[k] = tj["objective_weights"][name].get<double>();
        }
      }
    }
    if (tj.contains("negatives_per_positive")) c.train.negatives_per_positive = tj["negatives_per_positive"].get<int>();
    if (tj.contains("learning_rate")) c.train.learning_rate = tj["learning_rate"].get<double>();
    if (tj.contains("batch_size")) c.train.batch_size = tj["batch_size"].get<int>();
    if (tj.contains("max_epochs")) c.train.max_epochs = tj["max_epochs"].get<int>();
    if (tj.contains("patience")) c.train.patience = tj["patience"].get<int>();
    if (tj.contains("train_word_vectors")) c.train.train_word_vectors = tj["train_word_vectors"].get<bool>();
  }
  if (j.contains("em")) {
    const json& ej = j["em"];
    if (ej.contains("k")) c.em_k = ej["k"].get<int>();
    if (ej.contains("churn_threshold")) c.em_churn_threshold = ej["churn_threshold"].get<double>();
    if (ej.contains("ensemble_size")) c.em_ensemble_size = ej["ensemble_size"].get<int>();
    if (ej.contains("max_iterations")) c.em_max_iterations = ej["max_iterations"].get<int>();
    if (ej.contains("cold_restart")) c.em_cold_restart = ej["cold_restart"].get<bool>();
  }
  if (j.contains("eval") && j["eval"].contains("include_weak_labeled")) {
    c.eval_include_weak_labeled = j["eval"]["include_weak_labeled"].get<bool>();
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_run_config(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void save_run_config(const RunConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open config file for writing: " + path);
  out << run_config_to_json(config) << '\n';
}

std::string config_fingerprint(const RunConfig& config) {
  const std::string text = run_config_to_json(config);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::uint64_t stage_seed(std::uint64_t seed, std::string_view stage) {
  return Rng(seed).derive(stage).next_u64();
}

void write_manifest(const std::string& path, const std::string& command,
                    const RunConfig& config, const std::vector<std::string>& outputs,
                    const std::vector<std::string>& extra_inputs) {
  ordered_json j;
  j["tool"] = "usergraph";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["seed"] = config.seed;
  j["config"] = json::parse(run_config_to_json(config));
  if (!extra_inputs.empty()) j["inputs"] = extra_inputs;
  j["outputs"] = outputs;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace usergraph
