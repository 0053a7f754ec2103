#include <benchmark/benchmark.h>

#include "usergraph/rules.hpp"
#include "usergraph/synth.hpp"
#include "usergraph/trainer.hpp"

using namespace usergraph;

namespace {

Corpus bench_corpus(int n_users) {
  SynthParams p;
  p.n_users = n_users;
  p.desc_keyword_coverage = 0.3;
  p.seed = 12345;
  return generate_synthetic(p);
}

void BM_PreprocessText(benchmark::State& state) {
  const std::string raw =
      "Loving my morning #yoga flow :D check https://t.co/abc123 for the "
      "full routine \xF0\x9F\x98\x80 namaste friends";
  for (auto _ : state) {
    benchmark::DoNotOptimize(preprocess_text(raw));
  }
}
BENCHMARK(BM_PreprocessText);

void BM_PairLoss(benchmark::State& state) {
  double x = 0.0;
  for (auto _ : state) {
    x += pair_loss(1.3, -0.4);
  }
  benchmark::DoNotOptimize(x);
}
BENCHMARK(BM_PairLoss);

void BM_ApplyRules(benchmark::State& state) {
  RuleSet rules;
  rules.labels = {"practitioner", "promotional"};
  rules.rules.push_back({0, {"yoga", "meditation"}, {}, {"studio", "shop"}});
  rules.rules.push_back({1, {"studio", "shop"}, {}, {}});
  const TokenSeq desc = {"certified", "yoga", "teacher", "and", "meditation", "guide"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_rules(rules, desc));
  }
}
BENCHMARK(BM_ApplyRules);

void BM_BuildGraph(benchmark::State& state) {
  Corpus corpus = bench_corpus(static_cast<int>(state.range(0)));
  RuleSet rules;
  rules.labels = {"practitioner", "promotional"};
  rules.rules.push_back({0, {"praclife"}, {}, {}});
  rules.rules.push_back({1, {"promolife"}, {}, {}});
  WeakLabeling weak = label_corpus(rules, corpus);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_graph(corpus, weak, GraphView::DesNet));
  }
}
BENCHMARK(BM_BuildGraph)->Arg(100)->Arg(400);

void BM_EncodeUser(benchmark::State& state) {
  Corpus corpus = bench_corpus(10);
  const int word_dim = 300;
  VocabEmbeddings words = hashed_word_vectors(corpus, word_dim, 3);
  Rng rng(4);
  const bool lstm = state.range(0) == 1;
  EncoderParams params = lstm ? EncoderParams::bilstm(150, word_dim, rng)
                              : EncoderParams::mean_pool(300, word_dim, rng);
  const auto& tweets = corpus.users[0].tweet_tokens;
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode_user(words, params, tweets, nullptr));
  }
}
BENCHMARK(BM_EncodeUser)->Arg(0)->Arg(1);  // 0 = meanpool, 1 = bilstm

void BM_TrainEpoch(benchmark::State& state) {
  Corpus corpus = bench_corpus(100);
  RuleSet rules;
  rules.labels = {"practitioner", "promotional"};
  rules.rules.push_back({0, {"praclife"}, {}, {}});
  rules.rules.push_back({1, {"promolife"}, {}, {}});
  WeakLabeling weak = label_corpus(rules, corpus);
  InfoGraph graph = build_graph(corpus, weak, GraphView::DesNet);
  VocabEmbeddings words = hashed_word_vectors(corpus, 64, 5);

  TrainConfig cfg;
  cfg.max_epochs = 1;
  cfg.patience = 1;
  for (auto _ : state) {
    state.PauseTiming();
    Rng rng(6);
    EmbeddingSpace space =
        EmbeddingSpace::init(corpus, words, EncoderVariant::MeanPool, 64, 0, rng);
    state.ResumeTiming();
    benchmark::DoNotOptimize(train_embeddings(space, graph, cfg));
  }
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
