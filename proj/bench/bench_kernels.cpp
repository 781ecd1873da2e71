// Serial reference vs OpenMP kernels. The second argument of every benchmark
// selects the policy: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include "swarm/kernels.hpp"
#include "swarm/kmedoids.hpp"
#include "swarm/rng.hpp"

using namespace swarm;

namespace {

kernels::ExecPolicy policy_of(const benchmark::State& state) {
    return state.range(1) ? kernels::ExecPolicy::parallel : kernels::ExecPolicy::serial;
}

struct Batch {
    std::vector<ControllerGenome> genomes;
    std::vector<std::uint64_t> seeds;
};

Batch make_batch(std::size_t n, const SimProfile& p) {
    Rng rng(1);
    Batch b;
    for (std::size_t i = 0; i < n; ++i) {
        b.genomes.push_back({rng.uniform(-p.v_max, p.v_max), rng.uniform(-p.w_max, p.w_max),
                             rng.uniform(-p.v_max, p.v_max), rng.uniform(-p.w_max, p.w_max)});
        b.seeds.push_back(rng.next_u64());
    }
    return b;
}

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

void BM_HandcraftedBatch(benchmark::State& state) {
    const auto p = rsrs_profile();
    const auto b = make_batch(static_cast<std::size_t>(state.range(0)), p);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::handcrafted_batch(b.genomes, b.seeds, p, policy_of(state)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RenderStacks(benchmark::State& state) {
    const auto p = rsrs_profile();
    const auto b = make_batch(static_cast<std::size_t>(state.range(0)), p);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::render_stacks(b.genomes, b.seeds, p, kFrameSize, kFrameSize, policy_of(state)));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_NoveltyScores(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto ref = gaussian(n * kHandcraftedDim, 2), qs = gaussian(50 * kHandcraftedDim, 3);
    const PointSet r{ref, kHandcraftedDim}, q{qs, kHandcraftedDim};
    for (auto _ : state) benchmark::DoNotOptimize(kernels::novelty_scores(q, r, 15, policy_of(state)));
}

void BM_PairwiseDistances(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto xs = gaussian(n * kHandcraftedDim, 4);
    const PointSet pts{xs, kHandcraftedDim};
    for (auto _ : state) benchmark::DoNotOptimize(kernels::pairwise_distances(pts, policy_of(state)));
}

void BM_KMedoids(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto xs = gaussian(n * kHandcraftedDim, 5);
    const PointSet pts{xs, kHandcraftedDim};
    for (auto _ : state) benchmark::DoNotOptimize(k_medoids(pts, 10, 1, policy_of(state)));
}

}  // namespace

BENCHMARK(BM_HandcraftedBatch)->ArgsProduct({{16, 64}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RenderStacks)->ArgsProduct({{16, 64}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NoveltyScores)->ArgsProduct({{1000, 5000}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PairwiseDistances)->ArgsProduct({{500, 2000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KMedoids)->ArgsProduct({{1000, 5000}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
