#include <benchmark/benchmark.h>

#include "metro/analytics.hpp"
#include "metro/dynamics.hpp"
#include "metro/instances.hpp"

namespace {

metro::LineConfig line(std::size_t n) {
    metro::Rng rng(n + 1);
    metro::InstanceOptions opts;
    opts.min_segments = opts.max_segments = n;
    return metro::random_instance(rng, opts);
}

// Events per second for a line of state.range(0) segments.
void BM_SimulateFull(benchmark::State& state) {
    const auto cfg = line(static_cast<std::size_t>(state.range(0)));
    const metro::LineDynamics dyn(cfg, metro::derive_params(cfg), metro::ControlLaw::full_control());
    constexpr std::size_t kEvents = 1000;
    for (auto _ : state) benchmark::DoNotOptimize(dyn.simulate(kEvents));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kEvents * cfg.size()));
}
BENCHMARK(BM_SimulateFull)->RangeMultiplier(4)->Range(4, 256);

void BM_HeadwayFormula(benchmark::State& state) {
    const auto cfg = line(static_cast<std::size_t>(state.range(0)));
    const auto dp = metro::derive_params(cfg);
    for (auto _ : state) benchmark::DoNotOptimize(metro::headway_formula(cfg, dp));
}
BENCHMARK(BM_HeadwayFormula)->RangeMultiplier(4)->Range(4, 256);

}  // namespace
