#include <benchmark/benchmark.h>

#include "generators.hpp"
#include "ivy/embed/embedding.hpp"
#include "ivy/embed/index.hpp"

namespace {

using namespace ivy;

void BM_HashEmbed(benchmark::State& state) {
  embed::HashEmbedder e;
  testing::Rng rng(1);
  auto text = testing::random_words(rng, state.range(0), state.range(0), 500);
  for (auto _ : state) benchmark::DoNotOptimize(e.embed(text));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HashEmbed)->Arg(10)->Arg(100)->Arg(1000);

void BM_TopK(benchmark::State& state) {
  embed::HashEmbedder e;
  testing::Rng rng(2);
  auto index = embed::build_index(testing::random_corpus(rng, state.range(0), 200), e);
  auto query = e.embed("w1 w7 w42");
  for (auto _ : state) benchmark::DoNotOptimize(index.top_k(query, 4));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TopK)->Arg(100)->Arg(1000)->Arg(10000);

void BM_BuildIndex(benchmark::State& state) {
  embed::HashEmbedder e;
  testing::Rng rng(3);
  auto corpus = testing::random_corpus(rng, state.range(0), 200);
  for (auto _ : state) benchmark::DoNotOptimize(embed::build_index(corpus, e));
}
BENCHMARK(BM_BuildIndex)->Arg(100)->Arg(1000);

}  // namespace
