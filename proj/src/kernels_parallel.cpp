// OpenMP versions of the reference kernels. Each iteration owns its output
// slot, so results do not depend on scheduling; the only reduction (triplet
// counts) is over integers.

#include <exception>
#include <mutex>

#include "swarm/kernels.hpp"
#include "swarm/novelty.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace swarm::kernels::parallel {

namespace {

// Exceptions must not cross an OpenMP region boundary. Keeps the one thrown by
// the lowest iteration index so the reported error matches a serial run.
class FirstError {
public:
    void capture(std::ptrdiff_t index) {
        std::lock_guard lock(mutex_);
        if (!error_ || index < index_) {
            error_ = std::current_exception();
            index_ = index;
        }
    }
    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::mutex mutex_;
    std::exception_ptr error_;
    std::ptrdiff_t index_ = 0;
};

}  // namespace

int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::vector<HandcraftedMetrics> handcrafted_batch(std::span<const ControllerGenome> genomes,
                                                  std::span<const std::uint64_t> seeds, const SimProfile& profile) {
    const auto n = static_cast<std::ptrdiff_t>(genomes.size());
    std::vector<HandcraftedMetrics> out(genomes.size());
    FirstError error;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = handcrafted_embed(run_episode(genomes[i], profile, seeds[i]), profile);
        } catch (...) {
            error.capture(i);
        }
    }
    error.rethrow();
    return out;
}

std::vector<FrameStack> render_stacks(std::span<const ControllerGenome> genomes, std::span<const std::uint64_t> seeds,
                                      const SimProfile& profile, int width, int height) {
    const auto n = static_cast<std::ptrdiff_t>(genomes.size());
    std::vector<FrameStack> out(genomes.size());
    FirstError error;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = subsample(run_episode(genomes[i], profile, seeds[i]), width, height);
        } catch (...) {
            error.capture(i);
        }
    }
    error.rethrow();
    return out;
}

std::vector<double> novelty_scores(const PointSet& queries, const PointSet& reference, std::size_t k) {
    const auto n = static_cast<std::ptrdiff_t>(queries.size());
    std::vector<double> out(queries.size());
    FirstError error;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = novelty(queries.row(i), reference, k);
        } catch (...) {
            error.capture(i);
        }
    }
    error.rethrow();
    return out;
}

std::vector<double> cohort_novelty(const PointSet& cohort, std::size_t k) {
    const auto n = static_cast<std::ptrdiff_t>(cohort.size());
    std::vector<double> out(cohort.size());
    FirstError error;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = novelty(cohort.row(i), cohort, k, static_cast<std::size_t>(i));
        } catch (...) {
            error.capture(i);
        }
    }
    error.rethrow();
    return out;
}

std::vector<double> pairwise_distances(const PointSet& points) {
    const std::size_t n = points.size();
    const auto rows = static_cast<std::ptrdiff_t>(n);
    std::vector<double> out(n * n, 0.0);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (ui != j) out[ui * n + j] = l2_distance(points.row(ui), points.row(j));
        }
    }
    return out;
}

std::vector<SwapDelta> swap_deltas(const PointSet& points, std::span<const std::size_t> medoids,
                                   const MedoidCache& cache) {
    const auto n = static_cast<std::ptrdiff_t>(points.size());
    std::vector<SwapDelta> out(points.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t x = 0; x < n; ++x) {
        out[x] = detail::swap_delta_for(points, static_cast<std::size_t>(x), medoids, cache);
    }
    return out;
}

TripletTally count_triplets(const TripletQuery& q) {
    const auto n = static_cast<std::ptrdiff_t>(q.anchor.size());
    std::uint64_t success = 0;
    std::uint64_t total = 0;
#pragma omp parallel for schedule(static) reduction(+ : success, total)
    for (std::ptrdiff_t p = 0; p < n; ++p) {
        const auto t = detail::triplets_for_pair(q, static_cast<std::size_t>(p));
        success += t.success;
        total += t.total;
    }
    return {success, total};
}

}  // namespace swarm::kernels::parallel
