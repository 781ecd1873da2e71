#include <cmath>
#include <limits>
#include <vector>

#include "swarm/error.hpp"
#include "swarm/kernels.hpp"

namespace swarm::kernels {

namespace detail {

// FastPAM1-style evaluation: one pass over all points prices the removal of
// every medoid slot at once for the given candidate.
SwapDelta swap_delta_for(const PointSet& points, std::size_t candidate, std::span<const std::size_t> medoids,
                         const MedoidCache& cache) {
    for (const std::size_t m : medoids) {
        if (m == candidate) return {0, std::numeric_limits<double>::infinity()};
    }
    const std::size_t k = medoids.size();
    std::vector<double> per_slot(k, 0.0);
    double shared = 0.0;
    const auto cand = points.row(candidate);
    for (std::size_t o = 0; o < points.size(); ++o) {
        const double d = l2_distance(points.row(o), cand);
        const double d1 = cache.d_nearest[o];
        if (d < d1) {
            // o moves to the candidate whichever medoid leaves.
            shared += d - d1;
        } else {
            // Only matters if o's own medoid is the one removed.
            per_slot[cache.nearest[o]] += std::min(d, cache.d_second[o]) - d1;
        }
    }
    SwapDelta best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t s = 0; s < k; ++s) {
        const double total = shared + per_slot[s];
        if (total < best.delta) best = {s, total};
    }
    return best;
}

TripletTally triplets_for_pair(const TripletQuery& q, std::size_t pair) {
    const std::size_t a = q.anchor[pair];
    const double dap = q.distances[a * q.n + q.positive[pair]];
    TripletTally t;
    for (const std::size_t neg : q.negatives) {
        if (dap < q.distances[a * q.n + neg]) ++t.success;
    }
    t.total = q.negatives.size();
    return t;
}

}  // namespace detail

namespace {

void check_batch(std::span<const ControllerGenome> genomes, std::span<const std::uint64_t> seeds) {
    if (genomes.size() != seeds.size()) throw ValidationError("one spawn seed per genome required");
}

}  // namespace

std::vector<HandcraftedMetrics> handcrafted_batch(std::span<const ControllerGenome> genomes,
                                                  std::span<const std::uint64_t> seeds, const SimProfile& profile,
                                                  ExecPolicy policy) {
    check_batch(genomes, seeds);
    return policy == ExecPolicy::serial ? serial::handcrafted_batch(genomes, seeds, profile)
                                        : parallel::handcrafted_batch(genomes, seeds, profile);
}

std::vector<FrameStack> render_stacks(std::span<const ControllerGenome> genomes, std::span<const std::uint64_t> seeds,
                                      const SimProfile& profile, int width, int height, ExecPolicy policy) {
    check_batch(genomes, seeds);
    return policy == ExecPolicy::serial ? serial::render_stacks(genomes, seeds, profile, width, height)
                                        : parallel::render_stacks(genomes, seeds, profile, width, height);
}

std::vector<double> novelty_scores(const PointSet& queries, const PointSet& reference, std::size_t k,
                                   ExecPolicy policy) {
    return policy == ExecPolicy::serial ? serial::novelty_scores(queries, reference, k)
                                        : parallel::novelty_scores(queries, reference, k);
}

std::vector<double> cohort_novelty(const PointSet& cohort, std::size_t k, ExecPolicy policy) {
    return policy == ExecPolicy::serial ? serial::cohort_novelty(cohort, k) : parallel::cohort_novelty(cohort, k);
}

std::vector<double> pairwise_distances(const PointSet& points, ExecPolicy policy) {
    return policy == ExecPolicy::serial ? serial::pairwise_distances(points) : parallel::pairwise_distances(points);
}

std::vector<SwapDelta> swap_deltas(const PointSet& points, std::span<const std::size_t> medoids,
                                   const MedoidCache& cache, ExecPolicy policy) {
    return policy == ExecPolicy::serial ? serial::swap_deltas(points, medoids, cache)
                                        : parallel::swap_deltas(points, medoids, cache);
}

TripletTally count_triplets(const TripletQuery& q, ExecPolicy policy) {
    return policy == ExecPolicy::serial ? serial::count_triplets(q) : parallel::count_triplets(q);
}

}  // namespace swarm::kernels
