#include "swarm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "swarm/error.hpp"
#include "swarm/rng.hpp"
#include "swarm/text.hpp"

namespace swarm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kProjectionPasses = 8;

// Removes the part of `velocity` driving into a contact with outward normal
// `n` and scales what is left by (1 - mu).
Vec2 apply_contact(Vec2 velocity, Vec2 n, double mu) {
    const double into = dot(velocity, n);
    if (into >= 0.0) return velocity;
    const Vec2 tangential = velocity - n * into;
    return tangential * (1.0 - mu);
}

Vec2 clamp_to_arena(Vec2 p, const SimProfile& profile) {
    const double r = profile.body_radius;
    return {std::clamp(p.x, r, profile.arena_width - r), std::clamp(p.y, r, profile.arena_height - r)};
}

}  // namespace

double wrap_angle(double angle) noexcept {
    double a = std::fmod(angle, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    // fmod of a tiny negative value can round back up to exactly 2*pi.
    if (a >= kTwoPi) a = 0.0;
    return a;
}

const char* gene_name(std::size_t gene) noexcept {
    static constexpr const char* names[] = {"v_clear", "w_clear", "v_seen", "w_seen"};
    return gene < ControllerGenome::kGenes ? names[gene] : "?";
}

bool GenomeBounds::contains(const ControllerGenome& g) const noexcept {
    const auto genes = g.genes();
    for (std::size_t i = 0; i < genes.size(); ++i) {
        if (!(std::abs(genes[i]) <= limit(i))) return false;
    }
    return true;
}

void validate_genome(const ControllerGenome& genome, const SimProfile& profile) {
    const auto bounds = GenomeBounds::from(profile);
    const auto genes = genome.genes();
    for (std::size_t i = 0; i < genes.size(); ++i) {
        if (!(std::abs(genes[i]) <= bounds.limit(i))) {
            throw ValidationError(std::string("gene ") + gene_name(i) + " = " + text::format_double(genes[i]) +
                                  " outside [-" + text::format_double(bounds.limit(i)) + ", " +
                                  text::format_double(bounds.limit(i)) + "]");
        }
    }
}

std::array<Vec2, 12> spawn_lattice(const SimProfile& profile) {
    constexpr double pitch = 0.25;
    const Vec2 centre{profile.arena_width / 2, profile.arena_height / 2};
    std::array<Vec2, 12> points{};
    for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 4; ++col) {
            points[row * 4 + col] = centre + Vec2{(col - 1.5) * pitch, (row - 1.0) * pitch};
        }
    }
    return points;
}

WorldState spawn_world(const SimProfile& profile, std::uint64_t seed) {
    validate(profile);
    if (profile.n_agents > 12) {
        throw ConfigError("n_agents = " + std::to_string(profile.n_agents) + " exceeds the 12 spawn points");
    }
    const auto lattice = spawn_lattice(profile);
    std::array<std::size_t, 12> order{};
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    Rng rng(seed);
    WorldState world;
    world.agents.resize(static_cast<std::size_t>(profile.n_agents));
    for (std::size_t i = 0; i < world.agents.size(); ++i) {
        const std::size_t pick = i + rng.below(order.size() - i);
        std::swap(order[i], order[pick]);
        world.agents[i].position = lattice[order[i]];
        world.agents[i].heading = rng.uniform(0.0, kTwoPi);
    }
    for (std::size_t i = 0; i < world.agents.size(); ++i) {
        world.agents[i].last_sensor = sense_line_of_sight(world, i, profile);
    }
    world.rng_state = rng.next_u64();
    return world;
}

bool sense_line_of_sight(const WorldState& world, std::size_t agent_index, const SimProfile& profile) {
    const AgentState& self = world.agents[agent_index];
    const Vec2 dir = heading_vector(self.heading);
    const double r2 = profile.body_radius * profile.body_radius;
    for (std::size_t j = 0; j < world.agents.size(); ++j) {
        if (j == agent_index) continue;
        const Vec2 rel = world.agents[j].position - self.position;
        const double along = dot(rel, dir);
        const double off2 = norm_sq(rel) - along * along;
        if (off2 > r2) continue;
        const double half_chord = std::sqrt(std::max(0.0, r2 - off2));
        const double exit = along + half_chord;
        if (exit < 0.0) continue;  // disc behind the sensor
        const double entry = along - half_chord;
        if (entry <= profile.sensor_range) return true;
    }
    return false;
}

void advance_world(WorldState& world, const ControllerGenome& genome, const SimProfile& profile,
                   std::span<AgentVelocity> realized) {
    const std::size_t n = world.agents.size();
    const double r = profile.body_radius;
    const double contact = 2.0 * r + kPenetrationTolerance;
    const double mu = profile.friction_mu;

    std::vector<std::uint8_t> seen(n);
    for (std::size_t i = 0; i < n; ++i) seen[i] = sense_line_of_sight(world, i, profile) ? 1 : 0;

    std::vector<Vec2> previous(n);
    std::vector<Vec2> next(n);
    std::vector<AgentVelocity> applied(n);
    for (std::size_t i = 0; i < n; ++i) {
        AgentState& agent = world.agents[i];
        const double v = seen[i] ? genome.v_seen : genome.v_clear;
        const double w = seen[i] ? genome.w_seen : genome.w_clear;
        Vec2 vel = heading_vector(agent.heading) * v;

        // Contacts present at the start of the step constrain the motion.
        const Vec2 p = agent.position;
        if (p.x <= r + kPenetrationTolerance) vel = apply_contact(vel, {1, 0}, mu);
        if (p.x >= profile.arena_width - r - kPenetrationTolerance) vel = apply_contact(vel, {-1, 0}, mu);
        if (p.y <= r + kPenetrationTolerance) vel = apply_contact(vel, {0, 1}, mu);
        if (p.y >= profile.arena_height - r - kPenetrationTolerance) vel = apply_contact(vel, {0, -1}, mu);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const Vec2 away = p - world.agents[j].position;
            const double d = norm(away);
            if (d <= contact && d > 0.0) vel = apply_contact(vel, away * (1.0 / d), mu);
        }

        previous[i] = p;
        next[i] = p + vel * profile.dt;
        applied[i] = {vel, w};
        agent.heading = wrap_angle(agent.heading + w * profile.dt);
        agent.last_sensor = seen[i] != 0;
    }

    // Positional projection: push overlapping pairs apart along the centre
    // line, then clamp into the arena.
    const double min_dist = 2.0 * r;
    for (int pass = 0; pass < kProjectionPasses; ++pass) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                Vec2 delta = next[j] - next[i];
                const double d = norm(delta);
                if (d >= min_dist) continue;
                Vec2 axis;
                if (d > 0.0) {
                    axis = delta * (1.0 / d);
                } else {
                    // Coincident centres: separate along the pre-step centre line.
                    const Vec2 before = previous[j] - previous[i];
                    const double bd = norm(before);
                    axis = bd > 0.0 ? before * (1.0 / bd) : Vec2{1.0, 0.0};
                }
                const double push = 0.5 * (min_dist - d);
                next[i] -= axis * push;
                next[j] += axis * push;
                moved = true;
            }
        }
        for (auto& p : next) p = clamp_to_arena(p, profile);
        if (!moved) break;
    }

    // Agents still overlapping after the bounded passes return to their
    // pre-step positions, which satisfied the invariants. Reverting can expose
    // new overlaps with agents that moved into the vacated spot, so repeat to
    // closure (at most n rounds).
    std::vector<std::uint8_t> reverted(n, 0);
    const double limit = min_dist - kPenetrationTolerance;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (norm(next[j] - next[i]) >= limit) continue;
                for (const std::size_t k : {i, j}) {
                    if (!reverted[k]) {
                        reverted[k] = 1;
                        next[k] = previous[k];
                        applied[k].linear = {};
                        changed = true;
                    }
                }
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) world.agents[i].position = next[i];
    ++world.time_index;
    if (!realized.empty()) std::copy(applied.begin(), applied.end(), realized.begin());
}

WorldState step_world(const WorldState& world, const ControllerGenome& genome, const SimProfile& profile) {
    WorldState next = world;
    advance_world(next, genome, profile);
    return next;
}

void Trajectory::reserve(std::size_t snapshots) {
    positions.reserve(snapshots * n_agents);
    headings.reserve(snapshots * n_agents);
    velocities.reserve(snapshots * n_agents);
    sensors.reserve(snapshots * n_agents);
}

void Trajectory::append(const WorldState& world, std::span<const AgentVelocity> applied) {
    for (std::size_t i = 0; i < world.agents.size(); ++i) {
        const auto& a = world.agents[i];
        positions.push_back(a.position);
        headings.push_back(a.heading);
        velocities.push_back(applied.empty() ? AgentVelocity{} : applied[i]);
        sensors.push_back(a.last_sensor ? 1 : 0);
    }
}

Trajectory run_episode(const ControllerGenome& genome, const SimProfile& profile, std::uint64_t seed) {
    validate_genome(genome, profile);
    WorldState world = spawn_world(profile, seed);

    Trajectory traj;
    traj.profile = profile;
    traj.genome = genome;
    traj.seed = seed;
    traj.n_agents = world.agents.size();
    traj.reserve(static_cast<std::size_t>(profile.episode_steps) + 1);
    traj.append(world, {});

    std::vector<AgentVelocity> applied(world.agents.size());
    for (int step = 0; step < profile.episode_steps; ++step) {
        advance_world(world, genome, profile, applied);
        traj.append(world, applied);
    }
    return traj;
}

WallSlideProbe wall_slide_probe(const SimProfile& profile, int steps, double approach) {
    validate(profile);
    const double r = profile.body_radius;
    WorldState world;
    world.agents.push_back({{r + 0.1, r + 0.03}, wrap_angle(-approach), false});
    const ControllerGenome drive{profile.v_max, 0.0, profile.v_max, 0.0};

    WallSlideProbe probe;
    double sum = 0.0;
    for (int s = 0; s < steps; ++s) {
        const Vec2 before = world.agents[0].position;
        advance_world(world, drive, profile);
        if (before.y > r + kPenetrationTolerance) continue;
        const double progress = world.agents[0].position.x - before.x;
        if (probe.contact_steps == 0) {
            probe.min_progress = probe.max_progress = progress;
        } else {
            probe.min_progress = std::min(probe.min_progress, progress);
            probe.max_progress = std::max(probe.max_progress, progress);
        }
        sum += progress;
        ++probe.contact_steps;
    }
    if (probe.contact_steps > 0) probe.mean_progress = sum / probe.contact_steps;
    return probe;
}

}  // namespace swarm
