#include <benchmark/benchmark.h>

#include "wfsim/sweep.hpp"
#include "wfsim/synthgen.hpp"

using namespace wfsim;

namespace {

struct Fixture {
  Fixture() {
    synthgen::PatternSpec s;
    s.pattern = synthgen::Pattern::micro_write;
    w = workload::parse_workload(synthgen::generate(s));
    points = sweep::expand(synthgen::testbed_config(),
                           sweep::Axes{{1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}, {kMB}, {Placement{}}});
  }
  workload::Workload w;
  std::vector<sweep::Point> points;
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(sweep::run_serial(f.w, f.points, PlatformProfile{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.points.size()));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(sweep::run(f.w, f.points, PlatformProfile{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.points.size()));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
