#include <doctest.h>

#include <cstdlib>

#include "test_util.hpp"
#include "usergraph/cli.hpp"
#include "usergraph/config.hpp"
#include "usergraph/rules.hpp"

using namespace usergraph;

namespace {

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"usergraph"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_SUITE("config_cli") {

TEST_CASE("defaults match the documented settings") {
  RunConfig c = default_config();
  CHECK(c.d == 300);
  CHECK(c.hidden == 150);
  CHECK(c.word_dim == 300);
  CHECK(c.train.negatives_per_positive == 5);
  CHECK(c.train.learning_rate == 0.001);
  CHECK(c.train.batch_size == 16);
  CHECK(c.train.max_epochs == 100);
  CHECK(c.train.patience == 10);
  for (double w : c.train.objective_weights) CHECK(w == 1.0);
  CHECK(c.em_k == 20);
  CHECK(c.em_churn_threshold == 0.10);
  CHECK(c.em_ensemble_size == 3);
  CHECK(c.em_max_iterations == 10);
  CHECK(c.view == GraphView::DesNet);
  CHECK(c.eval_include_weak_labeled);
}

TEST_CASE("config files round-trip losslessly") {
  RunConfig c = default_config();
  c.seed = 1234;
  c.corpus_path = "x.jsonl";
  c.rules_path = "r.json";
  c.view = GraphView::Net;
  c.encoder = EncoderVariant::BiLstm;
  c.d = 64;
  c.hidden = 32;
  c.train.objective_weights[3] = 0.0;
  c.em_cold_restart = true;

  const std::string dir = testutil::tmp_dir("config_rt");
  save_run_config(c, dir + "/run.json");
  RunConfig once = load_run_config(dir + "/run.json");
  save_run_config(once, dir + "/run2.json");
  RunConfig twice = load_run_config(dir + "/run2.json");
  CHECK(run_config_to_json(once) == run_config_to_json(c));
  CHECK(run_config_to_json(twice) == run_config_to_json(once));
  CHECK(testutil::read_file(dir + "/run.json") == testutil::read_file(dir + "/run2.json"));
}

TEST_CASE("seed is mandatory in config files") {
  const std::string dir = testutil::tmp_dir("config_seed");
  testutil::write_file(dir + "/bad.json", "{\"corpus\": \"x\"}");
  CHECK_THROWS_WITH_AS(load_run_config(dir + "/bad.json"), doctest::Contains("seed"),
                       std::runtime_error);
}

TEST_CASE("fingerprint is stable and config-sensitive") {
  RunConfig a = default_config();
  RunConfig b = default_config();
  CHECK(config_fingerprint(a) == config_fingerprint(b));
  b.seed = 999;
  CHECK(config_fingerprint(a) != config_fingerprint(b));
}

TEST_CASE("stage seeds differ by stage and are deterministic") {
  CHECK(stage_seed(7, "train") == stage_seed(7, "train"));
  CHECK(stage_seed(7, "train") != stage_seed(7, "em"));
  CHECK(stage_seed(7, "train") != stage_seed(8, "train"));
}

TEST_CASE("cli: synth is byte-reproducible, manifest included") {
  const std::string dir = testutil::tmp_dir("cli_synth");
  const std::vector<std::string> args = {"synth", "--out", dir + "/c.jsonl",
                                         "--n", "12", "--seed", "7"};
  REQUIRE(run_cli(args) == 0);
  const std::string corpus_once = testutil::read_file(dir + "/c.jsonl");
  const std::string manifest_once = testutil::read_file(dir + "/c.jsonl.manifest.json");
  REQUIRE(run_cli(args) == 0);
  CHECK(testutil::read_file(dir + "/c.jsonl") == corpus_once);
  CHECK(testutil::read_file(dir + "/c.jsonl.manifest.json") == manifest_once);
  CHECK(!manifest_once.empty());
}

TEST_CASE("cli: weaklabel output matches the library path") {
  const std::string dir = testutil::tmp_dir("cli_weak");
  REQUIRE(run_cli({"synth", "--out", dir + "/c.jsonl", "--n", "15", "--seed", "3",
                   "--coverage", "0.8"}) == 0);
  REQUIRE(run_cli({"weaklabel", "--corpus", dir + "/c.jsonl", "--rules",
                   testutil::rules_path("synthetic.json"), "--out", dir + "/w.jsonl"}) == 0);

  Corpus corpus = load_corpus(dir + "/c.jsonl");
  WeakLabeling weak = label_corpus(load_rules(testutil::rules_path("synthetic.json")), corpus);
  const std::string text = testutil::read_file(dir + "/w.jsonl");
  CHECK(std::count(text.begin(), text.end(), '\n') ==
        static_cast<long>(weak.labels.size()));
  for (const auto& [id, label] : weak.labels) {
    CHECK(text.find("\"" + id + "\"") != std::string::npos);
  }
}

TEST_CASE("cli: unknown subcommand and unknown flag exit with 2") {
  CHECK(run_cli({"frobnicate"}) == 2);
  CHECK(run_cli({"synth", "--no-such-flag", "1", "--out", "x", "--seed", "1"}) == 2);
}

TEST_CASE("cli: missing input file exits with 1") {
  CHECK(run_cli({"weaklabel", "--corpus", "/nonexistent/c.jsonl", "--rules",
                 testutil::rules_path("synthetic.json"), "--out", "/tmp/never.jsonl"}) == 1);
}

TEST_CASE("cli: build-graph writes a loadable graph") {
  const std::string dir = testutil::tmp_dir("cli_graph");
  REQUIRE(run_cli({"synth", "--out", dir + "/c.jsonl", "--n", "10", "--seed", "5"}) == 0);
  REQUIRE(run_cli({"build-graph", "--corpus", dir + "/c.jsonl", "--rules",
                   testutil::rules_path("synthetic.json"), "--view", "desnet", "--out",
                   dir + "/g.json"}) == 0);
  InfoGraph g = graph_from_json(testutil::read_file(dir + "/g.json"));
  CHECK(g.n_users() == 10);
  CHECK(g.stats().edge_total() > 0);
}

TEST_CASE("cli: em + eval round-trip on a small config") {
  const std::string dir = testutil::tmp_dir("cli_em");
  REQUIRE(run_cli({"synth", "--out", dir + "/c.jsonl", "--n", "16", "--seed", "9",
                   "--coverage", "0.5"}) == 0);
  const std::string config = R"({
    "seed": 4,
    "corpus": ")" + dir + R"(/c.jsonl",
    "rules": ")" + testutil::rules_path("synthetic.json") + R"(",
    "out_dir": ")" + dir + R"(/out",
    "d": 8, "hidden": 4, "word_dim": 6,
    "train": {"max_epochs": 4, "patience": 4},
    "em": {"k": 3, "ensemble_size": 1, "max_iterations": 2}
  })";
  testutil::write_file(dir + "/run.json", config);
  REQUIRE(run_cli({"em", "--config", dir + "/run.json"}) == 0);
  for (const char* name : {"em_report.json", "promotions.csv", "losses.csv",
                           "checkpoint.json", "metrics.json", "manifest.json"}) {
    CHECK(!testutil::read_file(dir + "/out/" + name).empty());
  }
  REQUIRE(run_cli({"eval", "--corpus", dir + "/c.jsonl", "--predictions",
                   dir + "/out/em_report.json", "--out", dir + "/metrics2.json"}) == 0);
  CHECK(!testutil::read_file(dir + "/metrics2.json").empty());

  // export from the saved checkpoint
  REQUIRE(run_cli({"export", "--config", dir + "/run.json", "--checkpoint",
                   dir + "/out/checkpoint.json", "--out", dir + "/emb.csv"}) == 0);
  CHECK(!testutil::read_file(dir + "/emb.csv").empty());
}

}  // TEST_SUITE
