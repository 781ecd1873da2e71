#include "swarm/kmedoids.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "swarm/error.hpp"
#include "swarm/rng.hpp"

namespace swarm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

kernels::MedoidCache build_cache(const PointSet& points, const std::vector<std::size_t>& medoids) {
    const std::size_t n = points.size();
    kernels::MedoidCache cache{std::vector<std::size_t>(n, 0), std::vector<double>(n, kInf),
                               std::vector<double>(n, kInf)};
    for (std::size_t o = 0; o < n; ++o) {
        for (std::size_t s = 0; s < medoids.size(); ++s) {
            const double d = l2_distance(points.row(o), points.row(medoids[s]));
            if (d < cache.d_nearest[o]) {
                cache.d_second[o] = cache.d_nearest[o];
                cache.d_nearest[o] = d;
                cache.nearest[o] = s;
            } else if (d < cache.d_second[o]) {
                cache.d_second[o] = d;
            }
        }
    }
    return cache;
}

double total(const std::vector<double>& d) {
    double sum = 0.0;
    for (const double x : d) sum += x;
    return sum;
}

// n * C(n, k), saturating at `cap`.
std::size_t enumeration_work(std::size_t n, std::size_t k, std::size_t cap) {
    double subsets = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        subsets = subsets * static_cast<double>(n - i) / static_cast<double>(i + 1);
        if (subsets * static_cast<double>(n) > static_cast<double>(cap)) return cap + 1;
    }
    return static_cast<std::size_t>(subsets) * n;
}

// Exact optimum by enumerating every k-subset. Returns an empty vector when
// no subset beats `incumbent`.
std::vector<std::size_t> exhaustive_medoids(const PointSet& points, std::size_t k, double incumbent) {
    const std::size_t n = points.size();
    std::vector<double> dist(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = l2_distance(points.row(i), points.row(j));
    }
    std::vector<std::size_t> pick(k), best;
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    double best_cost = incumbent - 1e-12 * std::max(incumbent, 1.0);
    for (;;) {
        double cost = 0.0;
        for (std::size_t o = 0; o < n; ++o) {
            double d = kInf;
            for (const std::size_t m : pick) d = std::min(d, dist[o * n + m]);
            cost += d;
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = pick;
        }
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
}

// Instances this small are solved exactly after the swap phase, since a
// single-swap local optimum can miss the global one.
constexpr std::size_t kExhaustiveWork = 200000;

}  // namespace

double medoid_cost(const PointSet& points, const std::vector<std::size_t>& medoids) {
    return total(build_cache(points, medoids).d_nearest);
}

MedoidResult k_medoids(const PointSet& points, std::size_t k, std::uint64_t seed, kernels::ExecPolicy policy) {
    const std::size_t n = points.size();
    if (k == 0 || k > n) {
        throw ValidationError("k_medoids: k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    // BUILD: add the point that lowers the cost most, one medoid at a time.
    std::vector<std::size_t> medoids;
    std::vector<char> is_medoid(n, 0);
    std::vector<double> nearest(n, kInf);
    while (medoids.size() < k) {
        std::size_t best = n;
        double best_cost = kInf;
        for (const std::size_t c : order) {
            if (is_medoid[c]) continue;
            double cost = 0.0;
            for (std::size_t o = 0; o < n; ++o) {
                cost += std::min(nearest[o], l2_distance(points.row(o), points.row(c)));
            }
            if (cost < best_cost) {
                best_cost = cost;
                best = c;
            }
        }
        medoids.push_back(best);
        is_medoid[best] = 1;
        for (std::size_t o = 0; o < n; ++o) {
            nearest[o] = std::min(nearest[o], l2_distance(points.row(o), points.row(best)));
        }
    }

    // SWAP: apply the best improving (medoid, candidate) exchange until none
    // is left. A relative margin keeps rounding noise from cycling the loop.
    MedoidResult result;
    auto cache = build_cache(points, medoids);
    double cost = total(cache.d_nearest);
    for (;;) {
        const auto deltas = kernels::swap_deltas(points, medoids, cache, policy);
        std::size_t cand = n;
        for (const std::size_t c : order) {
            if (is_medoid[c]) continue;
            if (cand == n || deltas[c].delta < deltas[cand].delta) cand = c;
        }
        if (cand == n || !(deltas[cand].delta < -1e-12 * std::max(cost, 1.0))) break;
        const std::size_t slot = deltas[cand].slot;
        is_medoid[medoids[slot]] = 0;
        medoids[slot] = cand;
        is_medoid[cand] = 1;
        cache = build_cache(points, medoids);
        cost = total(cache.d_nearest);
        ++result.swaps;
    }
    if (k > 1 && k < n && enumeration_work(n, k, kExhaustiveWork) <= kExhaustiveWork) {
        auto exact = exhaustive_medoids(points, k, cost);
        if (!exact.empty()) {
            medoids = std::move(exact);
            cache = build_cache(points, medoids);
            cost = total(cache.d_nearest);
        }
    }
    result.medoids = std::move(medoids);
    result.assignment = std::move(cache.nearest);
    result.cost = cost;
    return result;
}

}  // namespace swarm
