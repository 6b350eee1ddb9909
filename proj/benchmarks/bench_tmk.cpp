#include <benchmark/benchmark.h>

#include "generators.hpp"
#include "ivy/tmk/parser.hpp"
#include "ivy/tmk/validate.hpp"

namespace {

using namespace ivy;

std::string model_text(int serial) {
  testing::Rng rng(static_cast<std::uint64_t>(serial));
  return tmk::serialize_tmk(testing::random_model(rng, serial).model);
}

void BM_ParseTmk(benchmark::State& state) {
  auto text = model_text(7);
  for (auto _ : state) benchmark::DoNotOptimize(tmk::parse_tmk(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseTmk);

void BM_ValidateTmk(benchmark::State& state) {
  auto model = tmk::parse_tmk(model_text(7));
  for (auto _ : state) benchmark::DoNotOptimize(tmk::validate(model));
}
BENCHMARK(BM_ValidateTmk);

void BM_SerializeTmk(benchmark::State& state) {
  auto model = tmk::parse_tmk(model_text(7));
  for (auto _ : state) benchmark::DoNotOptimize(tmk::serialize_tmk(model));
}
BENCHMARK(BM_SerializeTmk);

}  // namespace
