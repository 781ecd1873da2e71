#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swarm/sim.hpp"

namespace swarm {

enum class Backend : std::uint8_t { handcrafted = 0, learned = 1 };

const char* to_string(Backend backend) noexcept;
// Throws ConfigError for unknown names.
Backend parse_backend(const std::string& name);

// A point in behaviour space.
struct BehaviorVector {
    Backend backend = Backend::handcrafted;
    std::vector<double> values;

    std::size_t dim() const noexcept { return values.size(); }
    friend bool operator==(const BehaviorVector&, const BehaviorVector&) = default;
};

// Five normalised swarm order parameters over the second half of an episode.
// R is half the arena diagonal and mu_t the centroid at step t.
//   avg_speed         mean |v_i| / v_max                          in [0, 1]
//   angular_momentum  mean_t mean_i cross(p_i - mu_t, v_i) / (R v_max)   in [-1, 1]
//   radial_variance   mean_t var_i |p_i - mu_t| / R^2               >= 0
//   scatter           mean_t mean_i |p_i - mu_t|^2 / R^2            >= 0
//   group_rotation    mean_t mean_i  v_i/|v_i| . tangent_i          in [-1, 1]
// Agents at the centroid or at rest contribute zero to group_rotation.
struct HandcraftedMetrics {
    double avg_speed = 0.0;
    double angular_momentum = 0.0;
    double radial_variance = 0.0;
    double scatter = 0.0;
    double group_rotation = 0.0;

    BehaviorVector to_vector() const;
    friend bool operator==(const HandcraftedMetrics&, const HandcraftedMetrics&) = default;
};

inline constexpr std::size_t kHandcraftedDim = 5;
inline constexpr std::size_t kLearnedDim = 512;

// Per-snapshot centroid statistics, shared by the metrics and the classifier.
struct SwarmMoments {
    double scatter = 0.0;          // mean_i |p_i - mu|^2 / R^2
    double radial_variance = 0.0;  // var_i |p_i - mu| / R^2
    double angular_momentum = 0.0; // mean_i cross(p_i - mu, v_i) / (R v_max)
    double group_rotation = 0.0;
    double mean_speed = 0.0;       // mean_i |v_i| / v_max
};
SwarmMoments swarm_moments(std::span<const Vec2> positions, std::span<const AgentVelocity> velocities,
                           const SimProfile& profile);

// Throws ValidationError for trajectories with fewer than 2 snapshots.
HandcraftedMetrics handcrafted_embed(const Trajectory& traj, const SimProfile& profile);

// L2 distance. Throws ValidationError on dimension or backend mismatch.
double behavior_distance(const BehaviorVector& a, const BehaviorVector& b);

}  // namespace swarm
