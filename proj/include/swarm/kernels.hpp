#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swarm/behavior.hpp"
#include "swarm/capture.hpp"
#include "swarm/point_set.hpp"
#include "swarm/sim.hpp"

// Data-parallel hot loops of the pipeline. Each kernel exists twice: a plain
// serial loop kept as the reference, and an OpenMP version that must produce
// bit-identical results for any thread count (every output slot is written by
// exactly one iteration; reductions are over integers or done serially).
namespace swarm::kernels {

enum class ExecPolicy { serial, parallel };

// Per-candidate result of the PAM swap search: the best medoid slot to
// replace with this candidate and the change in total cost.
struct SwapDelta {
    std::size_t slot = 0;
    double delta = 0.0;
};

// Per-point cache of the current medoid configuration.
struct MedoidCache {
    std::vector<std::size_t> nearest;   // slot of nearest medoid
    std::vector<double> d_nearest;
    std::vector<double> d_second;       // +inf when k == 1
};

// Integer triplet tallies for one (anchor class, negative class) cell.
struct TripletTally {
    std::uint64_t success = 0;
    std::uint64_t total = 0;
};

// Exhaustive triplet test over a precomputed n x n distance matrix: every
// (anchor[i], positive[i]) pair against every index in `negatives`. A triplet
// succeeds when d(a, p) < d(a, n) strictly.
struct TripletQuery {
    std::span<const double> distances;  // n x n
    std::size_t n = 0;
    std::span<const std::size_t> anchor;
    std::span<const std::size_t> positive;
    std::span<const std::size_t> negatives;
};

namespace serial {
std::vector<HandcraftedMetrics> handcrafted_batch(std::span<const ControllerGenome> genomes,
                                                  std::span<const std::uint64_t> seeds, const SimProfile& profile);
std::vector<FrameStack> render_stacks(std::span<const ControllerGenome> genomes, std::span<const std::uint64_t> seeds,
                                      const SimProfile& profile, int width, int height);
std::vector<double> novelty_scores(const PointSet& queries, const PointSet& reference, std::size_t k);
std::vector<double> cohort_novelty(const PointSet& cohort, std::size_t k);
std::vector<double> pairwise_distances(const PointSet& points);
std::vector<SwapDelta> swap_deltas(const PointSet& points, std::span<const std::size_t> medoids,
                                   const MedoidCache& cache);
TripletTally count_triplets(const TripletQuery& q);
}  // namespace serial

namespace parallel {
std::vector<HandcraftedMetrics> handcrafted_batch(std::span<const ControllerGenome> genomes,
                                                  std::span<const std::uint64_t> seeds, const SimProfile& profile);
std::vector<FrameStack> render_stacks(std::span<const ControllerGenome> genomes, std::span<const std::uint64_t> seeds,
                                      const SimProfile& profile, int width, int height);
std::vector<double> novelty_scores(const PointSet& queries, const PointSet& reference, std::size_t k);
std::vector<double> cohort_novelty(const PointSet& cohort, std::size_t k);
std::vector<double> pairwise_distances(const PointSet& points);
std::vector<SwapDelta> swap_deltas(const PointSet& points, std::span<const std::size_t> medoids,
                                   const MedoidCache& cache);
TripletTally count_triplets(const TripletQuery& q);

// Threads OpenMP would use for a parallel region (1 without OpenMP).
int max_threads() noexcept;
}  // namespace parallel

// Policy dispatch.
std::vector<HandcraftedMetrics> handcrafted_batch(std::span<const ControllerGenome> genomes,
                                                  std::span<const std::uint64_t> seeds, const SimProfile& profile,
                                                  ExecPolicy policy = ExecPolicy::parallel);
std::vector<FrameStack> render_stacks(std::span<const ControllerGenome> genomes, std::span<const std::uint64_t> seeds,
                                      const SimProfile& profile, int width, int height,
                                      ExecPolicy policy = ExecPolicy::parallel);
std::vector<double> novelty_scores(const PointSet& queries, const PointSet& reference, std::size_t k,
                                   ExecPolicy policy = ExecPolicy::parallel);
std::vector<double> cohort_novelty(const PointSet& cohort, std::size_t k, ExecPolicy policy = ExecPolicy::parallel);
std::vector<double> pairwise_distances(const PointSet& points, ExecPolicy policy = ExecPolicy::parallel);
std::vector<SwapDelta> swap_deltas(const PointSet& points, std::span<const std::size_t> medoids,
                                   const MedoidCache& cache, ExecPolicy policy = ExecPolicy::parallel);
TripletTally count_triplets(const TripletQuery& q, ExecPolicy policy = ExecPolicy::parallel);

// Shared per-item bodies.
namespace detail {
SwapDelta swap_delta_for(const PointSet& points, std::size_t candidate, std::span<const std::size_t> medoids,
                         const MedoidCache& cache);
TripletTally triplets_for_pair(const TripletQuery& q, std::size_t pair);
}  // namespace detail

}  // namespace swarm::kernels
