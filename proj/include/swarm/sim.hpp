#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "swarm/geometry.hpp"
#include "swarm/profile.hpp"

namespace swarm {

// Reactive two-state controller shared by every agent: one (v, w) command
// when the line-of-sight sensor is clear, another when it sees a robot.
struct ControllerGenome {
    double v_clear = 0.0;  // m/s, sensor reads 0
    double w_clear = 0.0;  // rad/s, sensor reads 0
    double v_seen = 0.0;   // m/s, sensor reads 1
    double w_seen = 0.0;   // rad/s, sensor reads 1

    static constexpr std::size_t kGenes = 4;

    std::array<double, kGenes> genes() const noexcept { return {v_clear, w_clear, v_seen, w_seen}; }
    static ControllerGenome from_genes(const std::array<double, kGenes>& g) noexcept {
        return {g[0], g[1], g[2], g[3]};
    }
    friend bool operator==(const ControllerGenome&, const ControllerGenome&) = default;
};

const char* gene_name(std::size_t gene) noexcept;

// Symmetric box [-v_max, v_max] x [-w_max, w_max] per command pair.
struct GenomeBounds {
    double v_max = 0.0;
    double w_max = 0.0;

    static GenomeBounds from(const SimProfile& profile) noexcept { return {profile.v_max, profile.w_max}; }
    double limit(std::size_t gene) const noexcept { return gene % 2 == 0 ? v_max : w_max; }
    bool contains(const ControllerGenome& g) const noexcept;
};

// Throws ValidationError naming the first out-of-bounds gene.
void validate_genome(const ControllerGenome& genome, const SimProfile& profile);

struct AgentState {
    Vec2 position;
    double heading = 0.0;        // [0, 2*pi)
    bool last_sensor = false;    // reading that selected the most recent command
    friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct WorldState {
    std::vector<AgentState> agents;
    std::int64_t time_index = 0;
    std::uint64_t rng_state = 0;
    friend bool operator==(const WorldState&, const WorldState&) = default;
};

// Velocity actually applied in a step after contact handling.
struct AgentVelocity {
    Vec2 linear;
    double angular = 0.0;
    friend bool operator==(const AgentVelocity&, const AgentVelocity&) = default;
};

// 4 columns x 3 rows, 0.25 m pitch, centred in the arena. Row-major from the
// bottom-left point.
std::array<Vec2, 12> spawn_lattice(const SimProfile& profile);

// Places n_agents on distinct lattice points with uniform headings.
// Throws ConfigError when n_agents exceeds the 12 spawn points.
WorldState spawn_world(const SimProfile& profile, std::uint64_t seed);

// True iff the ray from the agent's centre along its heading enters another
// agent's disc within sensor_range. Walls are invisible.
bool sense_line_of_sight(const WorldState& world, std::size_t agent_index, const SimProfile& profile);

// One explicit-Euler step with contact handling. `realized`, when non-empty,
// receives each agent's applied velocity and must have one slot per agent.
void advance_world(WorldState& world, const ControllerGenome& genome, const SimProfile& profile,
                   std::span<AgentVelocity> realized = {});

WorldState step_world(const WorldState& world, const ControllerGenome& genome, const SimProfile& profile);

// Full episode record. Snapshot t holds the state after t steps; velocities at
// t are the ones applied during step t-1 -> t (zero at t = 0); sensors at t are
// the readings that chose those commands (the spawn reading at t = 0).
struct Trajectory {
    SimProfile profile;
    ControllerGenome genome;
    std::uint64_t seed = 0;
    std::size_t n_agents = 0;
    std::vector<Vec2> positions;
    std::vector<double> headings;
    std::vector<AgentVelocity> velocities;
    std::vector<std::uint8_t> sensors;

    std::size_t length() const noexcept { return n_agents == 0 ? 0 : positions.size() / n_agents; }
    std::size_t steps() const noexcept { return length() == 0 ? 0 : length() - 1; }

    std::span<const Vec2> positions_at(std::size_t t) const { return {positions.data() + t * n_agents, n_agents}; }
    std::span<const double> headings_at(std::size_t t) const { return {headings.data() + t * n_agents, n_agents}; }
    std::span<const AgentVelocity> velocities_at(std::size_t t) const {
        return {velocities.data() + t * n_agents, n_agents};
    }
    std::span<const std::uint8_t> sensors_at(std::size_t t) const { return {sensors.data() + t * n_agents, n_agents}; }

    void reserve(std::size_t snapshots);
    void append(const WorldState& world, std::span<const AgentVelocity> applied);

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// Throws ValidationError if the genome is outside the profile bounds.
Trajectory run_episode(const ControllerGenome& genome, const SimProfile& profile, std::uint64_t seed);

// One agent driven at v_max into the bottom wall at `approach` radians below
// the wall tangent, starting near the left wall. Progress is the displacement
// along the wall per step, measured over steps that begin in wall contact.
struct WallSlideProbe {
    int contact_steps = 0;
    double mean_progress = 0.0;  // metres per step
    double min_progress = 0.0;
    double max_progress = 0.0;
};
WallSlideProbe wall_slide_probe(const SimProfile& profile, int steps = 40, double approach = 0.7853981633974483);

}  // namespace swarm
