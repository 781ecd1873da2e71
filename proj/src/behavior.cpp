#include "swarm/behavior.hpp"

#include <cmath>

#include "swarm/error.hpp"
#include "swarm/point_set.hpp"

namespace swarm {

namespace {
constexpr double kTiny = 1e-12;
}

const char* to_string(Backend backend) noexcept {
    return backend == Backend::handcrafted ? "metrics" : "endpoint";
}

Backend parse_backend(const std::string& name) {
    if (name == "metrics" || name == "handcrafted") return Backend::handcrafted;
    if (name == "endpoint" || name == "learned") return Backend::learned;
    throw ConfigError("unknown backend '" + name + "' (expected metrics or endpoint)");
}

BehaviorVector HandcraftedMetrics::to_vector() const {
    return {Backend::handcrafted, {avg_speed, angular_momentum, radial_variance, scatter, group_rotation}};
}

SwarmMoments swarm_moments(std::span<const Vec2> positions, std::span<const AgentVelocity> velocities,
                           const SimProfile& profile) {
    SwarmMoments m;
    const std::size_t n = positions.size();
    if (n == 0) return m;
    const double inv_n = 1.0 / static_cast<double>(n);
    const double radius = profile.half_diagonal();

    Vec2 centroid;
    for (const Vec2 p : positions) centroid += p;
    centroid *= inv_n;

    double sum_r = 0.0, sum_r2 = 0.0, sum_cross = 0.0, sum_rot = 0.0, sum_speed = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 rel = positions[i] - centroid;
        const Vec2 v = velocities[i].linear;
        const double r2 = norm_sq(rel);
        const double r = std::sqrt(r2);
        const double speed = norm(v);
        sum_r += r;
        sum_r2 += r2;
        sum_cross += cross(rel, v);
        sum_speed += speed;
        if (r > kTiny && speed > kTiny) sum_rot += dot(v, perp(rel)) / (speed * r);
    }
    const double mean_r = sum_r * inv_n;
    const double mean_r2 = sum_r2 * inv_n;
    m.scatter = mean_r2 / (radius * radius);
    m.radial_variance = std::max(0.0, mean_r2 - mean_r * mean_r) / (radius * radius);
    m.angular_momentum = sum_cross * inv_n / (radius * profile.v_max);
    m.group_rotation = sum_rot * inv_n;
    m.mean_speed = sum_speed * inv_n / profile.v_max;
    return m;
}

HandcraftedMetrics handcrafted_embed(const Trajectory& traj, const SimProfile& profile) {
    if (traj.length() < 2 && traj.n_agents > 0) {
        throw ValidationError("handcrafted metrics need at least 2 snapshots");
    }
    HandcraftedMetrics out;
    if (traj.n_agents == 0) return out;

    const std::size_t last = traj.steps();
    const std::size_t first = last / 2;
    double speed = 0, am = 0, rv = 0, sc = 0, gr = 0;
    for (std::size_t t = first; t <= last; ++t) {
        const auto m = swarm_moments(traj.positions_at(t), traj.velocities_at(t), profile);
        speed += m.mean_speed;
        am += m.angular_momentum;
        rv += m.radial_variance;
        sc += m.scatter;
        gr += m.group_rotation;
    }
    const double inv = 1.0 / static_cast<double>(last - first + 1);
    out.avg_speed = speed * inv;
    out.angular_momentum = am * inv;
    out.radial_variance = rv * inv;
    out.scatter = sc * inv;
    out.group_rotation = gr * inv;
    return out;
}

double behavior_distance(const BehaviorVector& a, const BehaviorVector& b) {
    if (a.backend != b.backend) throw ValidationError("behaviour vectors come from different backends");
    if (a.dim() != b.dim()) {
        throw ValidationError("behaviour dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                              std::to_string(b.dim()));
    }
    return l2_distance(a.values, b.values);
}

}  // namespace swarm
