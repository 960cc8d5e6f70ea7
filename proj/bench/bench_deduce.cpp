// Parallel deduction kernel against the serial reference on random rooms.

#include <benchmark/benchmark.h>

#include <random>

#include "spatial/deduction.hpp"

namespace {

spatial::FactBase random_room(int n) {
  std::mt19937_64 rng(static_cast<unsigned>(n));
  std::uniform_real_distribution<double> pos(-5.0, 5.0), height(0.0, 1.5), ext(0.1, 2.0), yaw(-spatial::kPi, spatial::kPi);
  spatial::FactBase fb;
  for (int i = 0; i < n; ++i) {
    spatial::SpatialObject o;
    o.id = "o" + std::to_string(i);
    o.x = pos(rng), o.y = height(rng), o.z = pos(rng);
    o.w = ext(rng), o.h = ext(rng), o.d = ext(rng);
    o.angle = yaw(rng);
    o.observer = i == 0;
    fb.upsert(o);
  }
  return fb;
}

std::set<spatial::Category> every_category() {
  std::set<spatial::Category> out;
  for (std::size_t i = 0; i < spatial::kCategoryCount; ++i) out.insert(static_cast<spatial::Category>(i));
  return out;
}

template <bool Parallel>
void BM_Deduce(benchmark::State& state) {
  const auto base = random_room(static_cast<int>(state.range(0)));
  const auto categories = every_category();
  const spatial::AdjustmentSettings settings;
  for (auto _ : state) {
    spatial::FactBase fb = base;
    if constexpr (Parallel) spatial::deduce(fb, categories, settings);
    else spatial::deduce_serial(fb, categories, settings);
    benchmark::DoNotOptimize(fb.relations().data());
  }
  const auto pairs = state.range(0) * (state.range(0) - 1);
  state.SetItemsProcessed(state.iterations() * pairs);
}

}  // namespace

BENCHMARK(BM_Deduce<false>)->Name("deduce_serial")->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Deduce<true>)->Name("deduce_parallel")->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
