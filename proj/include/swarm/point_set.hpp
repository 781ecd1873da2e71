#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace swarm {

// Non-owning row-major view of `size()` points of dimension `dim`.
struct PointSet {
    std::span<const double> data;
    std::size_t dim = 0;

    std::size_t size() const noexcept { return dim == 0 ? 0 : data.size() / dim; }
    bool empty() const noexcept { return size() == 0; }
    std::span<const double> row(std::size_t i) const { return data.subspan(i * dim, dim); }
};

// Euclidean distance; components accumulated in index order.
inline double l2_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace swarm
