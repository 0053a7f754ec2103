#include "usergraph/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "usergraph/baseline.hpp"
#include "usergraph/config.hpp"
#include "usergraph/eval.hpp"
#include "usergraph/synth.hpp"

namespace usergraph {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

StopwordSet stopwords_for(const RunConfig& config) {
  if (config.stopwords_path.empty()) return default_stopwords();
  return load_stopwords(config.stopwords_path);
}

// Corpus + rules + weak labels + word vectors, the common front of every
// model stage.
struct LoadedInputs {
  Corpus corpus;
  LoadStats load_stats;
  RuleSet rules;
  WeakLabeling weak;
  ModelSetup model;
};

LoadedInputs load_inputs(const RunConfig& config) {
  if (config.corpus_path.empty()) throw std::runtime_error("config: \"corpus\" path is required");
  if (config.rules_path.empty()) throw std::runtime_error("config: \"rules\" path is required");

  LoadedInputs in;
  const StopwordSet stopwords = stopwords_for(config);
  in.corpus = load_corpus(config.corpus_path, &in.load_stats, stopwords);
  in.rules = load_rules(config.rules_path);
  in.weak = label_corpus(in.rules, in.corpus);

  if (config.word_vectors_path.empty()) {
    in.model.words = hashed_word_vectors(in.corpus, config.word_dim,
                                         stage_seed(config.seed, "word-vectors"));
  } else {
    in.model.words = load_word_vectors(config.word_vectors_path, config.word_dim);
  }
  in.model.words.trainable = config.train.train_word_vectors;
  in.model.variant = config.encoder;
  in.model.d = config.d;
  in.model.hidden = config.hidden;
  in.model.max_seq_len = config.max_seq_len;
  return in;
}

void ensure_out_dir(const RunConfig& config) {
  if (!config.out_dir.empty()) fs::create_directories(config.out_dir);
}

std::string out_path(const RunConfig& config, const std::string& name) {
  return (fs::path(config.out_dir) / name).string();
}

EvalOptions eval_options(const RunConfig& config, const WeakLabeling* weak) {
  EvalOptions opt;
  opt.include_weak_labeled = config.eval_include_weak_labeled;
  opt.weak = weak;
  opt.config_fingerprint = config_fingerprint(config);
  return opt;
}

bool corpus_has_gold(const Corpus& corpus) {
  for (const User& u : corpus.users) {
    if (u.gold_label) return true;
  }
  return false;
}

std::string predictions_to_json(const std::vector<Prediction>& preds) {
  ordered_json arr = json::array();
  for (const Prediction& p : preds) {
    ordered_json j;
    j["user_id"] = p.user_id;
    j["label"] = p.label;
    j["confidence"] = p.confidence;
    j["source"] = to_string(p.source);
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

// Accepts either an em report (object with "final_predictions") or a bare
// prediction array.
std::vector<Prediction> load_predictions(const std::string& path, const Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open predictions file: " + path);
  json j = json::parse(in);
  const json* arr = nullptr;
  if (j.is_object() && j.contains("final_predictions")) {
    arr = &j["final_predictions"];
  } else if (j.is_array()) {
    arr = &j;
  } else {
    throw std::runtime_error(path + ": expected a prediction array or an em report");
  }
  std::vector<Prediction> preds;
  for (const auto& pj : *arr) {
    Prediction p;
    p.user_id = pj.at("user_id").get<std::string>();
    if (pj.at("label").is_string()) {
      const int t = corpus.type_index(pj["label"].get<std::string>());
      if (t < 0) throw std::runtime_error(path + ": unknown label for " + p.user_id);
      p.label = t;
    } else {
      p.label = pj["label"].get<int>();
    }
    if (pj.contains("confidence")) p.confidence = pj["confidence"].get<double>();
    preds.push_back(std::move(p));
  }
  return preds;
}

// --- subcommand bodies ---

int cmd_synth(const SynthParams& params, const std::string& out) {
  Corpus corpus = generate_synthetic(params);
  save_corpus(corpus, out);

  ordered_json manifest;
  manifest["tool"] = "usergraph";
  manifest["version"] = "0.1.0";
  manifest["command"] = "synth";
  manifest["seed"] = params.seed;
  ordered_json pj;
  pj["n_users"] = params.n_users;
  pj["vocab_size_per_type"] = params.vocab_size_per_type;
  pj["shared_vocab_size"] = params.shared_vocab_size;
  pj["separation"] = params.separation;
  pj["desc_keyword_coverage"] = params.desc_keyword_coverage;
  pj["homophily"] = params.homophily;
  pj["tweets_per_user"] = params.tweets_per_user;
  pj["tokens_per_tweet"] = params.tokens_per_tweet;
  manifest["params"] = std::move(pj);
  manifest["outputs"] = {out};
  write_text(out + ".manifest.json", manifest.dump(2) + "\n");

  std::cout << "synth: wrote " << corpus.users.size() << " users to " << out << "\n";
  return 0;
}

void require_path(const std::string& path, const char* what) {
  if (path.empty()) {
    throw std::runtime_error(std::string(what) + " path is required (flag or config)");
  }
}

int cmd_weaklabel(const RunConfig& config, const std::string& out) {
  require_path(config.corpus_path, "corpus");
  require_path(config.rules_path, "rules");
  const StopwordSet stopwords = stopwords_for(config);
  LoadStats stats;
  Corpus corpus = load_corpus(config.corpus_path, &stats, stopwords);
  RuleSet rules = load_rules(config.rules_path);
  WeakLabeling weak = label_corpus(rules, corpus);

  std::ostringstream lines;
  for (const auto& [user_id, label] : weak.labels) {
    ordered_json j;
    j["user_id"] = user_id;
    j["label"] = corpus.type_names[label];
    lines << j.dump() << '\n';
  }
  write_text(out, lines.str());
  write_manifest(out + ".manifest.json", "weaklabel", config, {out});

  std::cout << "weaklabel: " << weak.labels.size() << "/" << corpus.users.size()
            << " users labeled (coverage " << weak.coverage << ", conflicts "
            << weak.conflict_count << ")\n";
  if (corpus_has_gold(corpus)) {
    const QualityReport q = assess_quality(weak, corpus);
    std::cout << "weaklabel: quality vs gold on " << q.n_overlap
              << " overlapping users: accuracy " << q.accuracy << ", macro-F1 " << q.macro_f1
              << "\n";
  }
  return 0;
}

int cmd_build_graph(const RunConfig& config, const std::string& out) {
  require_path(config.corpus_path, "corpus");
  require_path(config.rules_path, "rules");
  const StopwordSet stopwords = stopwords_for(config);
  Corpus corpus = load_corpus(config.corpus_path, nullptr, stopwords);
  RuleSet rules = load_rules(config.rules_path);
  WeakLabeling weak = label_corpus(rules, corpus);
  InfoGraph graph = build_graph(corpus, weak, config.view);

  write_text(out, graph_to_json(graph));
  write_manifest(out + ".manifest.json", "build-graph", config, {out});

  const GraphStats s = graph.stats();
  std::cout << "build-graph: " << 2 * graph.n_users() + kNumTypes << " nodes, "
            << s.edge_total() << " edges (view " << to_string(config.view) << ") -> " << out
            << "\n";
  return 0;
}

int cmd_train(const RunConfig& config) {
  LoadedInputs in = load_inputs(config);
  ensure_out_dir(config);
  InfoGraph graph = build_graph(in.corpus, in.weak, config.view);

  Rng rng = Rng(config.seed).derive("train-init");
  EmbeddingSpace space = EmbeddingSpace::init(in.corpus, in.model.words, in.model.variant,
                                              in.model.d, in.model.hidden, rng,
                                              in.model.max_seq_len);
  TrainConfig tc = config.train;
  tc.seed = stage_seed(config.seed, "train");
  TrainResult result = train_embeddings(space, graph, tc);

  const std::string ckpt = out_path(config, "checkpoint.json");
  const std::string losses = out_path(config, "loss_history.csv");
  write_text(ckpt, checkpoint_to_json(space));
  write_text(losses, loss_history_to_csv(result.history));
  write_manifest(out_path(config, "manifest.json"), "train", config, {ckpt, losses});

  std::cout << "train: " << result.history.size() << " epochs, best epoch "
            << result.best_epoch << ", final loss "
            << (result.history.empty() ? 0.0 : result.history.back().total) << "\n";
  return 0;
}

int cmd_em(const RunConfig& config) {
  LoadedInputs in = load_inputs(config);
  ensure_out_dir(config);

  EmConfig em = config.em_config();
  em.train.seed = stage_seed(config.seed, "em");

  EmbeddingSpace space;
  InfoGraph graph(0, config.view);
  EmRunReport report = run_em(in.corpus, in.weak, em, config.view, in.model, &space, &graph);

  const std::string report_path = out_path(config, "em_report.json");
  const std::string promotions_path = out_path(config, "promotions.csv");
  const std::string losses_path = out_path(config, "losses.csv");
  const std::string ckpt_path = out_path(config, "checkpoint.json");
  write_text(report_path, em_report_to_json(report));
  write_text(promotions_path, promotions_to_csv(report));
  write_text(losses_path, em_losses_to_csv(report));
  write_text(ckpt_path, checkpoint_to_json(space));

  std::vector<std::string> outputs = {report_path, promotions_path, losses_path, ckpt_path};
  if (corpus_has_gold(in.corpus)) {
    const EvalReport ev = evaluate(report.final_predictions, in.corpus,
                                   eval_options(config, &in.weak));
    const std::string metrics_path = out_path(config, "metrics.json");
    write_text(metrics_path, eval_report_to_json(ev));
    outputs.push_back(metrics_path);
    std::cout << "em: accuracy " << ev.accuracy << ", macro-F1 " << ev.macro_f1 << " over "
              << ev.n_eval << " gold users\n";
  }
  write_manifest(out_path(config, "manifest.json"), "em", config, outputs);

  std::cout << "em: " << report.iterations_run << " iterations (" << report.stop_reason
            << "), " << report.final_stats.edge_total() << " edges ("
            << report.final_stats.inferred_total() << " inferred)\n";
  return 0;
}

int cmd_baseline(const RunConfig& config) {
  LoadedInputs in = load_inputs(config);
  ensure_out_dir(config);

  TrainConfig tc = config.train;
  tc.seed = stage_seed(config.seed, "baseline");
  BaselineResult result =
      train_supervised_baseline(in.corpus, in.weak, tc, in.model.words, in.model.variant,
                                in.model.d, in.model.hidden, in.model.max_seq_len);

  std::vector<Prediction> preds;
  preds.reserve(in.corpus.users.size());
  for (int u = 0; u < static_cast<int>(in.corpus.users.size()); ++u) {
    Prediction p;
    p.user_id = in.corpus.users[static_cast<std::size_t>(u)].user_id;
    p.label = result.model.predict(u);
    const Eigen::Vector2d s = result.model.logits(u);
    p.confidence = std::abs(std::tanh(0.5 * (s(0) - s(1))));
    p.source = PredictionSource::Final;
    preds.push_back(std::move(p));
  }

  const std::string preds_path = out_path(config, "baseline_predictions.json");
  write_text(preds_path, predictions_to_json(preds));
  std::vector<std::string> outputs = {preds_path};

  if (corpus_has_gold(in.corpus)) {
    const EvalReport ev = evaluate(preds, in.corpus, eval_options(config, &in.weak));
    const std::string metrics_path = out_path(config, "baseline_metrics.json");
    write_text(metrics_path, eval_report_to_json(ev));
    outputs.push_back(metrics_path);
    std::cout << "baseline: accuracy " << ev.accuracy << ", macro-F1 " << ev.macro_f1
              << " over " << ev.n_eval << " gold users\n";
  }
  write_manifest(out_path(config, "manifest.json"), "baseline", config, outputs);
  std::cout << "baseline: best epoch " << result.best_epoch << " (validation loss "
            << (result.best_epoch >= 0 ? result.val_losses[static_cast<std::size_t>(result.best_epoch)] : 0.0)
            << ")\n";
  return 0;
}

int cmd_eval(const RunConfig& config, const std::string& predictions_path,
             const std::string& out, bool exclude_weak) {
  require_path(config.corpus_path, "corpus");
  const StopwordSet stopwords = stopwords_for(config);
  Corpus corpus = load_corpus(config.corpus_path, nullptr, stopwords);
  std::vector<Prediction> preds = load_predictions(predictions_path, corpus);

  WeakLabeling weak;
  EvalOptions opt;
  opt.include_weak_labeled = !exclude_weak;
  opt.config_fingerprint = config_fingerprint(config);
  if (!config.rules_path.empty()) {
    RuleSet rules = load_rules(config.rules_path);
    weak = label_corpus(rules, corpus);
    opt.weak = &weak;
  } else if (exclude_weak) {
    throw std::runtime_error("eval: --exclude-weak requires --rules");
  }

  const EvalReport report = evaluate(preds, corpus, opt);
  const std::string text = eval_report_to_json(report);
  std::cout << text << "\n";
  if (!out.empty()) {
    write_text(out, text);
    write_manifest(out + ".manifest.json", "eval", config, {out}, {predictions_path});
  }
  return 0;
}

int cmd_ablation(const RunConfig& config) {
  LoadedInputs in = load_inputs(config);
  if (!corpus_has_gold(in.corpus)) {
    throw std::runtime_error("ablation: corpus has no gold labels to evaluate against");
  }
  ensure_out_dir(config);

  EmConfig em = config.em_config();
  em.train.seed = stage_seed(config.seed, "ablation");
  std::vector<AblationRow> rows =
      run_ablation(in.corpus, in.weak, em, in.model, eval_options(config, &in.weak));

  const std::string csv_path = out_path(config, "ablation.csv");
  write_text(csv_path, ablation_to_csv(rows));

  ordered_json j = json::array();
  for (const AblationRow& r : rows) {
    ordered_json rj;
    rj["model"] = r.model;
    rj["view"] = to_string(r.view);
    rj["report"] = json::parse(eval_report_to_json(r.report));
    j.push_back(std::move(rj));
  }
  const std::string json_path = out_path(config, "ablation.json");
  write_text(json_path, j.dump(2));
  write_manifest(out_path(config, "manifest.json"), "ablation", config, {csv_path, json_path});

  std::cout << ablation_to_csv(rows);
  return 0;
}

int cmd_export(const RunConfig& config, const std::string& checkpoint_path,
               const std::string& out) {
  LoadedInputs in = load_inputs(config);
  std::ifstream ck(checkpoint_path);
  if (!ck) throw std::runtime_error("cannot open checkpoint: " + checkpoint_path);
  std::ostringstream buf;
  buf << ck.rdbuf();
  EmbeddingSpace space = checkpoint_from_json(buf.str(), in.corpus);
  InfoGraph graph = build_graph(in.corpus, in.weak, config.view);

  export_embeddings(space, graph, in.corpus, out);
  write_manifest(out + ".manifest.json", "export", config, {out}, {checkpoint_path});
  std::cout << "export: wrote " << 2 * graph.n_users() + kNumTypes << " node vectors to "
            << out << "\n";
  return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"Weakly supervised user-type classification over an information graph"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus (JSONL)");
  SynthParams sp;
  std::string synth_out;
  synth->add_option("--out", synth_out, "Output corpus path")->required();
  synth->add_option("--seed", sp.seed, "Generator seed")->required();
  synth->add_option("--n", sp.n_users, "Number of users");
  synth->add_option("--vocab-per-type", sp.vocab_size_per_type, "Type vocabulary size");
  synth->add_option("--shared-vocab", sp.shared_vocab_size, "Shared vocabulary size");
  synth->add_option("--separation", sp.separation, "P(tweet token from type vocabulary)");
  synth->add_option("--coverage", sp.desc_keyword_coverage, "P(description carries type tag)");
  synth->add_option("--homophily", sp.homophily, "P(mention targets same-type user)");
  synth->add_option("--tweets-per-user", sp.tweets_per_user, "Tweets per user");
  synth->add_option("--tokens-per-tweet", sp.tokens_per_tweet, "Tokens per tweet");

  // Config-driven subcommands share these override flags.
  struct Common {
    std::string config_path, corpus, rules, out_dir, stopwords, word_vectors;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> view, encoder;
  };
  auto add_common = [](CLI::App* cmd, Common& c, bool config_required) {
    auto* opt = cmd->add_option("--config", c.config_path, "Run configuration JSON");
    if (config_required) opt->required();
    cmd->add_option("--corpus", c.corpus, "Corpus JSONL (overrides config)");
    cmd->add_option("--rules", c.rules, "Rule file (overrides config)");
    cmd->add_option("--out-dir", c.out_dir, "Output directory (overrides config)");
    cmd->add_option("--stopwords", c.stopwords, "Stopword file (overrides config)");
    cmd->add_option("--word-vectors", c.word_vectors, "Word vector file (overrides config)");
    cmd->add_option("--seed", [&c](const std::vector<std::string>& v) {
      c.seed = std::stoull(v[0]);
      return true;
    }, "Top-level seed (overrides config)");
    cmd->add_option("--view", [&c](const std::vector<std::string>& v) {
      c.view = v[0];
      return true;
    }, "Graph view: des|net|desnet (overrides config)");
    cmd->add_option("--encoder", [&c](const std::vector<std::string>& v) {
      c.encoder = v[0];
      return true;
    }, "Encoder: meanpool|bilstm (overrides config)");
  };
  auto resolve_config = [](const Common& c) {
    RunConfig cfg = c.config_path.empty() ? default_config() : load_run_config(c.config_path);
    if (!c.corpus.empty()) cfg.corpus_path = c.corpus;
    if (!c.rules.empty()) cfg.rules_path = c.rules;
    if (!c.out_dir.empty()) cfg.out_dir = c.out_dir;
    if (!c.stopwords.empty()) cfg.stopwords_path = c.stopwords;
    if (!c.word_vectors.empty()) cfg.word_vectors_path = c.word_vectors;
    if (c.seed) cfg.seed = *c.seed;
    if (c.view) cfg.view = view_from_string(*c.view);
    if (c.encoder) cfg.encoder = encoder_variant_from_string(*c.encoder);
    cfg.validate();
    return cfg;
  };

  Common weaklabel_c, graph_c, train_c, em_c, baseline_c, eval_c, ablation_c, export_c;
  std::string weaklabel_out, graph_out, eval_preds, eval_out, export_ckpt, export_out;
  bool eval_exclude_weak = false;

  auto* weaklabel = app.add_subcommand("weaklabel", "Apply keyword rules to a corpus");
  add_common(weaklabel, weaklabel_c, false);
  weaklabel->add_option("--out", weaklabel_out, "Weak label JSONL output")->required();

  auto* buildgraph = app.add_subcommand("build-graph", "Build and export the information graph");
  add_common(buildgraph, graph_c, false);
  buildgraph->add_option("--out", graph_out, "Graph JSON output")->required();

  auto* train = app.add_subcommand("train", "Train the joint embedding once");
  add_common(train, train_c, true);

  auto* em = app.add_subcommand("em", "Run the iterative train/promote loop");
  add_common(em, em_c, true);

  auto* baseline = app.add_subcommand("baseline", "Train the supervised sequence baseline");
  add_common(baseline, baseline_c, true);

  auto* evalcmd = app.add_subcommand("eval", "Evaluate predictions against gold labels");
  add_common(evalcmd, eval_c, false);
  evalcmd->add_option("--predictions", eval_preds, "Predictions JSON (array or em report)")
      ->required();
  evalcmd->add_option("--out", eval_out, "Metrics JSON output (optional)");
  evalcmd->add_flag("--exclude-weak", eval_exclude_weak,
                    "Drop weakly labeled users from the holdout (needs --rules)");

  auto* ablation = app.add_subcommand("ablation", "Run the 6-row view/model ablation");
  add_common(ablation, ablation_c, true);

  auto* exportcmd = app.add_subcommand("export", "Export node embeddings to CSV");
  add_common(exportcmd, export_c, true);
  exportcmd->add_option("--checkpoint", export_ckpt, "Checkpoint JSON")->required();
  exportcmd->add_option("--out", export_out, "Embedding CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(sp, synth_out);
    if (weaklabel->parsed()) return cmd_weaklabel(resolve_config(weaklabel_c), weaklabel_out);
    if (buildgraph->parsed()) return cmd_build_graph(resolve_config(graph_c), graph_out);
    if (train->parsed()) return cmd_train(resolve_config(train_c));
    if (em->parsed()) return cmd_em(resolve_config(em_c));
    if (baseline->parsed()) return cmd_baseline(resolve_config(baseline_c));
    if (evalcmd->parsed()) {
      return cmd_eval(resolve_config(eval_c), eval_preds, eval_out, eval_exclude_weak);
    }
    if (ablation->parsed()) return cmd_ablation(resolve_config(ablation_c));
    if (exportcmd->parsed()) return cmd_export(resolve_config(export_c), export_ckpt, export_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace usergraph
