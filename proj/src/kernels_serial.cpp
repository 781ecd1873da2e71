// Reference implementations: straightforward loops, no threading.

#include <limits>

#include "swarm/kernels.hpp"
#include "swarm/novelty.hpp"

namespace swarm::kernels::serial {

std::vector<HandcraftedMetrics> handcrafted_batch(std::span<const ControllerGenome> genomes,
                                                  std::span<const std::uint64_t> seeds, const SimProfile& profile) {
    std::vector<HandcraftedMetrics> out(genomes.size());
    for (std::size_t i = 0; i < genomes.size(); ++i) {
        out[i] = handcrafted_embed(run_episode(genomes[i], profile, seeds[i]), profile);
    }
    return out;
}

std::vector<FrameStack> render_stacks(std::span<const ControllerGenome> genomes, std::span<const std::uint64_t> seeds,
                                      const SimProfile& profile, int width, int height) {
    std::vector<FrameStack> out(genomes.size());
    for (std::size_t i = 0; i < genomes.size(); ++i) {
        out[i] = subsample(run_episode(genomes[i], profile, seeds[i]), width, height);
    }
    return out;
}

std::vector<double> novelty_scores(const PointSet& queries, const PointSet& reference, std::size_t k) {
    std::vector<double> out(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) out[i] = novelty(queries.row(i), reference, k);
    return out;
}

std::vector<double> cohort_novelty(const PointSet& cohort, std::size_t k) {
    std::vector<double> out(cohort.size());
    for (std::size_t i = 0; i < cohort.size(); ++i) out[i] = novelty(cohort.row(i), cohort, k, i);
    return out;
}

std::vector<double> pairwise_distances(const PointSet& points) {
    const std::size_t n = points.size();
    std::vector<double> out(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) out[i * n + j] = l2_distance(points.row(i), points.row(j));
        }
    }
    return out;
}

std::vector<SwapDelta> swap_deltas(const PointSet& points, std::span<const std::size_t> medoids,
                                   const MedoidCache& cache) {
    std::vector<SwapDelta> out(points.size());
    for (std::size_t x = 0; x < points.size(); ++x) out[x] = detail::swap_delta_for(points, x, medoids, cache);
    return out;
}

TripletTally count_triplets(const TripletQuery& q) {
    TripletTally total;
    for (std::size_t p = 0; p < q.anchor.size(); ++p) {
        const auto t = detail::triplets_for_pair(q, p);
        total.success += t.success;
        total.total += t.total;
    }
    return total;
}

}  // namespace swarm::kernels::serial
