#include <benchmark/benchmark.h>

#include <random>

#include "iqswitch/analytics.hpp"
#include "iqswitch/core.hpp"
#include "iqswitch/geometry.hpp"
#include "iqswitch/scheduler.hpp"
#include "iqswitch/sim.hpp"
#include "iqswitch/traffic.hpp"

using namespace iqswitch;

namespace {

QueueMatrix random_queues(std::size_t n, std::uint64_t max_entry, Rng& rng) {
    std::uniform_int_distribution<std::uint64_t> entry(0, max_entry);
    QueueMatrix q(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q(i, j) = entry(rng);
    return q;
}

void BM_MaxWeight(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    const QueueMatrix q = random_queues(n, 50, rng);
    MaxWeightScheduler scheduler;
    for (auto _ : state) benchmark::DoNotOptimize(scheduler.schedule(q, rng));
}
BENCHMARK(BM_MaxWeight)->RangeMultiplier(2)->Range(2, 64);

void BM_MaxWeightBruteForce(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    const QueueMatrix q = random_queues(n, 50, rng);
    for (auto _ : state) benchmark::DoNotOptimize(maxweight_bruteforce(q));
}
BENCHMARK(BM_MaxWeightBruteForce)->DenseRange(3, 7, 2);

void BM_ApplyStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(2);
    QueueMatrix q = random_queues(n, 50, rng);
    ArrivalMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) a(i, (i + 1) % n) = 1;
    std::vector<int> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>((i + 1) % n);
    const ScheduleMatrix s = ScheduleMatrix::from_permutation(perm);
    for (auto _ : state) benchmark::DoNotOptimize(apply_step(q, a, s, 1));
}
BENCHMARK(BM_ApplyStep)->RangeMultiplier(2)->Range(2, 32);

void BM_ProjectSubspace(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const CollapseFrame frame(n, n / 2, n / 3);
    Rng rng(3);
    RealMatrix x(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) x(i, j) = uniform01(rng);
    for (auto _ : state) benchmark::DoNotOptimize(project_subspace(x, frame));
}
BENCHMARK(BM_ProjectSubspace)->RangeMultiplier(2)->Range(4, 64);

void BM_ProjectCone(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const CollapseFrame frame(n, n / 2, n / 3);
    Rng rng(4);
    RealMatrix x(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) x(i, j) = uniform01(rng) - 0.5;
    for (auto _ : state) benchmark::DoNotOptimize(project_cone(x, frame));
}
BENCHMARK(BM_ProjectCone)->RangeMultiplier(2)->Range(4, 32);

// Whole-simulation throughput, reported as slots per second.
void BM_SwitchSlots(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto spec =
        TrafficSpec::create(RealMatrix(n, 1.0 / static_cast<double>(n)), RealMatrix(n, 1.0), 0.1, ArrivalFamily{}, 1);
    SimConfig cfg = make_sim_config(spec, 5);
    cfg.warmup = 1000;
    cfg.horizon = 20000;
    const auto alpha = ones_weight_vector(n);
    for (auto _ : state) benchmark::DoNotOptimize(run_switch(cfg, alpha));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.warmup + cfg.horizon));
}
BENCHMARK(BM_SwitchSlots)->Arg(3)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
