#include <benchmark/benchmark.h>

#include "metro/cycle_ratio.hpp"
#include "metro/dynamics.hpp"
#include "metro/instances.hpp"

namespace {

metro::EventGraph line_graph(std::size_t n) {
    metro::Rng rng(n);
    metro::InstanceOptions opts;
    opts.min_segments = opts.max_segments = n;
    const auto cfg = metro::random_instance(rng, opts);
    return metro::build_event_graph(cfg, metro::derive_params(cfg));
}

void BM_Howard(benchmark::State& state) {
    const auto g = line_graph(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(metro::howard_cycle_ratio(g));
}
BENCHMARK(BM_Howard)->RangeMultiplier(2)->Range(4, 256);

void BM_Karp(benchmark::State& state) {
    const auto g = line_graph(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(metro::karp_cycle_ratio(g));
}
BENCHMARK(BM_Karp)->RangeMultiplier(2)->Range(4, 256);

void BM_Enumerate(benchmark::State& state) {
    const auto g = line_graph(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(metro::enumerate_cycle_ratios(g, g.node_count()));
}
BENCHMARK(BM_Enumerate)->DenseRange(4, 12, 4);

}  // namespace
