#include <benchmark/benchmark.h>

#include "support.hpp"

namespace {

using namespace ivy;

void BM_PipelineRelevant(benchmark::State& state) {
  testing::PipelineRig rig(testing::mock_script("painting"), {testing::planning_model()});
  const char* q = "What is the goal of the painting task in partial order planning?";
  for (auto _ : state) {
    benchmark::DoNotOptimize(rig.pipeline->run(q, "partial-order-planning", docs::CorpusMode::kTmk));
  }
}
BENCHMARK(BM_PipelineRelevant);

void BM_PipelineRefusal(benchmark::State& state) {
  testing::PipelineRig rig(testing::mock_script("eval"), {testing::sorting_model()});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        rig.pipeline->run("How do you make a quesadilla?", "sorting", docs::CorpusMode::kTmk));
  }
}
BENCHMARK(BM_PipelineRefusal);

}  // namespace
