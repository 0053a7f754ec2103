#include <doctest.h>

#include "test_util.hpp"
#include "usergraph/baseline.hpp"
#include "usergraph/synth.hpp"

using namespace usergraph;

TEST_SUITE("baseline") {

TEST_CASE("separable corpus reaches high training accuracy") {
  SynthParams p;
  p.n_users = 60;
  p.separation = 1.0;
  p.desc_keyword_coverage = 1.0;
  p.seed = 19;
  Corpus corpus = generate_synthetic(p);
  RuleSet rules = load_rules(testutil::rules_path("synthetic.json"));
  WeakLabeling weak = label_corpus(rules, corpus);
  REQUIRE(weak.coverage == 1.0);

  VocabEmbeddings words = hashed_word_vectors(corpus, 16, 7);
  TrainConfig cfg;
  cfg.max_epochs = 60;
  cfg.patience = 20;
  cfg.learning_rate = 0.01;
  cfg.seed = 99;
  BaselineResult r = train_supervised_baseline(corpus, weak, cfg, words,
                                               EncoderVariant::MeanPool, 16, 0);

  int correct = 0, total = 0;
  for (const auto& [user_id, label] : weak.labels) {
    const int u = corpus.index_of(user_id);
    if (r.model.predict(u) == label) ++correct;
    ++total;
  }
  CHECK(static_cast<double>(correct) / total >= 0.95);
}

TEST_CASE("prediction is deterministic after training") {
  SynthParams p;
  p.n_users = 20;
  p.desc_keyword_coverage = 1.0;
  p.seed = 23;
  Corpus corpus = generate_synthetic(p);
  RuleSet rules = load_rules(testutil::rules_path("synthetic.json"));
  WeakLabeling weak = label_corpus(rules, corpus);
  VocabEmbeddings words = hashed_word_vectors(corpus, 8, 3);
  TrainConfig cfg;
  cfg.max_epochs = 5;
  cfg.patience = 5;
  cfg.seed = 7;

  auto run = [&]() {
    BaselineResult r = train_supervised_baseline(corpus, weak, cfg, words,
                                                 EncoderVariant::MeanPool, 8, 0);
    std::vector<int> preds;
    for (int u = 0; u < static_cast<int>(corpus.users.size()); ++u) {
      preds.push_back(r.model.predict(u));
    }
    return preds;
  };
  CHECK(run() == run());
}

TEST_CASE("validation split is one fifth, floored, at least one") {
  SynthParams p;
  p.n_users = 24;
  p.desc_keyword_coverage = 1.0;
  p.seed = 29;
  Corpus corpus = generate_synthetic(p);
  RuleSet rules = load_rules(testutil::rules_path("synthetic.json"));
  WeakLabeling weak = label_corpus(rules, corpus);
  // keep exactly 10 labeled users
  while (weak.labels.size() > 10) weak.labels.erase(std::prev(weak.labels.end()));
  weak.coverage = 10.0 / 24.0;

  VocabEmbeddings words = hashed_word_vectors(corpus, 4, 5);
  TrainConfig cfg;
  cfg.max_epochs = 2;
  cfg.patience = 2;
  BaselineResult r = train_supervised_baseline(corpus, weak, cfg, words,
                                               EncoderVariant::MeanPool, 4, 0);
  CHECK(r.n_val == 2);
  CHECK(r.n_train == 8);
}

TEST_CASE("fewer than five labeled users is an error") {
  Corpus corpus = testutil::tiny_corpus({{"a", "x", {"t"}},
                                         {"b", "y", {"t"}},
                                         {"c", "z", {"t"}},
                                         {"d", "w", {"t"}},
                                         {"e", "v", {"t"}}});
  WeakLabeling weak;
  weak.labels = {{"a", 0}, {"b", 1}, {"c", 0}, {"d", 1}};
  VocabEmbeddings words = hashed_word_vectors(corpus, 4, 1);
  TrainConfig cfg;
  CHECK_THROWS_AS(train_supervised_baseline(corpus, weak, cfg, words,
                                            EncoderVariant::MeanPool, 4, 0),
                  std::runtime_error);
}

TEST_CASE("returned parameters are the best-validation snapshot") {
  SynthParams p;
  p.n_users = 40;
  p.desc_keyword_coverage = 1.0;
  p.seed = 37;
  Corpus corpus = generate_synthetic(p);
  RuleSet rules = load_rules(testutil::rules_path("synthetic.json"));
  WeakLabeling weak = label_corpus(rules, corpus);
  VocabEmbeddings words = hashed_word_vectors(corpus, 8, 11);
  TrainConfig cfg;
  cfg.max_epochs = 30;
  cfg.patience = 30;
  cfg.learning_rate = 0.01;
  BaselineResult r = train_supervised_baseline(corpus, weak, cfg, words,
                                               EncoderVariant::MeanPool, 8, 0);
  REQUIRE(r.best_epoch >= 0);
  double best = r.val_losses[static_cast<std::size_t>(r.best_epoch)];
  for (double v : r.val_losses) CHECK(best <= v + 1e-15);
}

}  // TEST_SUITE
