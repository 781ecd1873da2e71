#pragma once

#include <cstdint>
#include <vector>

#include "swarm/kernels.hpp"
#include "swarm/point_set.hpp"

namespace swarm {

struct MedoidResult {
    std::vector<std::size_t> medoids;     // point indices, in selection order
    std::vector<std::size_t> assignment;  // per point: position in `medoids`
    double cost = 0.0;                    // sum of point-to-medoid distances
    int swaps = 0;
};

// PAM under L2: greedy BUILD, then repeated best-improvement swaps until no
// swap lowers the cost. The seed fixes the order in which candidates are
// visited, which only matters for breaking exact ties. Instances with
// n * C(n, k) <= 200000 are then solved exactly by enumeration, since a
// swap-stable configuration need not be the global optimum.
// Throws ValidationError unless 1 <= k <= points.size().
MedoidResult k_medoids(const PointSet& points, std::size_t k, std::uint64_t seed,
                       kernels::ExecPolicy policy = kernels::ExecPolicy::parallel);

// Cost of a medoid set with every point sent to its nearest medoid.
double medoid_cost(const PointSet& points, const std::vector<std::size_t>& medoids);

}  // namespace swarm
