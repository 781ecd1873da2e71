// Closed-form class generators. They stand in for hand-labelled videos: each
// draws a trajectory whose class is known by construction.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "swarm/error.hpp"
#include "swarm/evaluation.hpp"
#include "swarm/rng.hpp"

namespace swarm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Sample {
    Vec2 position;
    Vec2 velocity;
};

// Builds a trajectory from a per-(agent, step) sampler.
template <class F>
Trajectory build(const SimProfile& profile, std::uint64_t seed, F&& sample) {
    Trajectory traj;
    traj.profile = profile;
    traj.seed = seed;
    traj.n_agents = static_cast<std::size_t>(profile.n_agents);
    const auto snapshots = static_cast<std::size_t>(profile.episode_steps) + 1;
    traj.reserve(snapshots);
    for (std::size_t t = 0; t < snapshots; ++t) {
        for (std::size_t i = 0; i < traj.n_agents; ++i) {
            const Sample s = sample(i, t);
            traj.positions.push_back(s.position);
            const double heading = norm(s.velocity) > 0 ? wrap_angle(std::atan2(s.velocity.y, s.velocity.x)) : 0.0;
            traj.headings.push_back(heading);
            traj.velocities.push_back({t == 0 ? Vec2{} : s.velocity, 0.0});
            traj.sensors.push_back(0);
        }
    }
    return traj;
}

Vec2 centre_of(const SimProfile& p) { return {p.arena_width / 2, p.arena_height / 2}; }

std::vector<Vec2> spawn_positions(const SimProfile& profile, std::uint64_t seed) {
    std::vector<Vec2> out;
    for (const auto& a : spawn_world(profile, seed).agents) out.push_back(a.position);
    return out;
}

Vec2 centroid_of(const std::vector<Vec2>& pts) {
    Vec2 c;
    for (const Vec2 p : pts) c += p;
    return c * (1.0 / static_cast<double>(pts.size()));
}

// Smoothstep move from a to b finishing at time `arrive` (seconds); at rest after.
Sample ease(Vec2 a, Vec2 b, double time, double arrive) {
    if (time >= arrive) return {b, {}};
    const double u = time / arrive;
    const double s = u * u * (3 - 2 * u);
    const double ds = 6 * u * (1 - u) / arrive;
    return {a + (b - a) * s, (b - a) * ds};
}

Trajectory cyclic_pursuit(const SimProfile& p, std::uint64_t seed, Rng& rng) {
    const double ring = rng.uniform(0.28, 0.34) * std::min(p.arena_width, p.arena_height) / 1.42;
    const double speed = rng.uniform(0.9, 1.0) * p.v_max;
    const double phase = rng.uniform(0, kTwoPi);
    const Vec2 c = centre_of(p) + Vec2{rng.uniform(-0.03, 0.03), rng.uniform(-0.03, 0.03)};
    const double omega = speed / ring;
    const double n = p.n_agents;
    return build(p, seed, [&](std::size_t i, std::size_t t) {
        const double a = phase + kTwoPi * static_cast<double>(i) / n + omega * p.dt * static_cast<double>(t);
        const Vec2 radial{std::cos(a), std::sin(a)};
        return Sample{c + radial * ring, perp(radial) * speed};
    });
}

// Concentric orbits at unequal radii, each radius shared by an opposite pair
// of agents so the centroid stays put.
Trajectory milling(const SimProfile& p, std::uint64_t seed, Rng& rng) {
    const double scale = std::min(p.arena_width, p.arena_height) / 1.42;
    std::vector<double> radius(static_cast<std::size_t>(p.n_agents));
    std::vector<double> speed(radius.size());
    std::vector<double> phase(radius.size());
    for (std::size_t i = 0; i < radius.size(); i += 2) {
        const double level = static_cast<double>(i / 2) / std::max(1.0, (static_cast<double>(radius.size()) - 1) / 2);
        const double r = scale * (0.10 + 0.38 * level + rng.uniform(-0.02, 0.02));
        const double v = rng.uniform(0.35, 0.5) * p.v_max;
        const double a = rng.uniform(0, kTwoPi);
        for (std::size_t j = i; j < std::min(i + 2, radius.size()); ++j) {
            radius[j] = r;
            speed[j] = v;
            phase[j] = a + (j - i) * std::numbers::pi;
        }
    }
    const Vec2 c = centre_of(p);
    return build(p, seed, [&](std::size_t i, std::size_t t) {
        const double a = phase[i] + speed[i] / radius[i] * p.dt * static_cast<double>(t);
        const Vec2 radial{std::cos(a), std::sin(a)};
        return Sample{c + radial * radius[i], perp(radial) * speed[i]};
    });
}

// Lattice spawn contracting onto a tight cluster, then at rest.
Trajectory aggregation(const SimProfile& p, std::uint64_t seed, Rng& rng) {
    const auto start = spawn_positions(p, seed);
    const Vec2 c = centroid_of(start) + Vec2{rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)};
    const double spacing = 2.1 * p.body_radius;
    const double arrive = rng.uniform(0.25, 0.45) * p.episode_steps * p.dt;
    std::vector<Vec2> target(start.size());
    const double turn = rng.uniform(0, kTwoPi);
    for (std::size_t i = 0; i < target.size(); ++i) {
        // First agent in the middle, the rest on a ring around it.
        if (i == 0) {
            target[i] = c;
        } else {
            const double a = turn + kTwoPi * static_cast<double>(i - 1) / static_cast<double>(target.size() - 1);
            const double ring = spacing / (2 * std::sin(std::numbers::pi / std::max<double>(3, target.size() - 1)));
            target[i] = c + Vec2{std::cos(a), std::sin(a)} * std::max(ring, spacing);
        }
    }
    return build(p, seed, [&](std::size_t i, std::size_t t) {
        return ease(start[i], target[i], p.dt * static_cast<double>(t), arrive);
    });
}

// Radial spread from the spawn centroid to just inside the walls, then at rest.
Trajectory dispersal(const SimProfile& p, std::uint64_t seed, Rng& rng) {
    const auto start = spawn_positions(p, seed);
    const Vec2 c = centroid_of(start);
    const double arrive = rng.uniform(0.3, 0.45) * p.episode_steps * p.dt;
    const double inset = p.body_radius + rng.uniform(0.02, 0.06);
    std::vector<Vec2> target(start.size());
    for (std::size_t i = 0; i < start.size(); ++i) {
        Vec2 dir = start[i] - c;
        if (norm(dir) < 1e-9) dir = heading_vector(kTwoPi * static_cast<double>(i) / static_cast<double>(start.size()));
        dir = dir * (1.0 / norm(dir));
        // Walk the ray until it meets the inset rectangle.
        double reach = std::numeric_limits<double>::infinity();
        if (dir.x > 0) reach = std::min(reach, (p.arena_width - inset - c.x) / dir.x);
        if (dir.x < 0) reach = std::min(reach, (inset - c.x) / dir.x);
        if (dir.y > 0) reach = std::min(reach, (p.arena_height - inset - c.y) / dir.y);
        if (dir.y < 0) reach = std::min(reach, (inset - c.y) / dir.y);
        target[i] = c + dir * reach;
    }
    return build(p, seed, [&](std::size_t i, std::size_t t) {
        return ease(start[i], target[i], p.dt * static_cast<double>(t), arrive);
    });
}

// Counter-clockwise laps of a track just inside the walls.
Trajectory wall_following(const SimProfile& p, std::uint64_t seed, Rng& rng) {
    const double inset = p.body_radius + rng.uniform(0.005, 0.015);
    const double w = p.arena_width - 2 * inset;
    const double h = p.arena_height - 2 * inset;
    const double lap = 2 * (w + h);
    const double speed = rng.uniform(0.85, 1.0) * p.v_max;
    const double offset = rng.uniform(0, lap);
    const double n = p.n_agents;
    return build(p, seed, [&](std::size_t i, std::size_t t) {
        double s = std::fmod(offset + lap * static_cast<double>(i) / n + speed * p.dt * static_cast<double>(t), lap);
        if (s < w) return Sample{{inset + s, inset}, {speed, 0}};
        s -= w;
        if (s < h) return Sample{{inset + w, inset + s}, {0, speed}};
        s -= h;
        if (s < w) return Sample{{inset + w - s, inset + h}, {-speed, 0}};
        s -= w;
        return Sample{{inset, inset + h - s}, {0, -speed}};
    });
}

// Independent correlated random walks reflected at the walls.
Trajectory random_walk(const SimProfile& p, std::uint64_t seed, Rng& rng) {
    const auto start = spawn_positions(p, seed);
    const std::size_t n = start.size();
    const auto steps = static_cast<std::size_t>(p.episode_steps);
    std::vector<Sample> samples((steps + 1) * n);
    const double lo_x = p.body_radius, hi_x = p.arena_width - p.body_radius;
    const double lo_y = p.body_radius, hi_y = p.arena_height - p.body_radius;
    for (std::size_t i = 0; i < n; ++i) {
        const double speed = rng.uniform(0.4, 0.7) * p.v_max;
        double heading = rng.uniform(0, kTwoPi);
        Vec2 pos = start[i];
        samples[i] = {pos, {}};
        for (std::size_t t = 1; t <= steps; ++t) {
            heading += 0.5 * rng.normal();
            Vec2 next = pos + heading_vector(heading) * (speed * p.dt);
            if (next.x < lo_x || next.x > hi_x) {
                next.x = std::clamp(next.x, lo_x, hi_x);
                heading = std::numbers::pi - heading;
            }
            if (next.y < lo_y || next.y > hi_y) {
                next.y = std::clamp(next.y, lo_y, hi_y);
                heading = -heading;
            }
            samples[t * n + i] = {next, (next - pos) * (1.0 / p.dt)};
            pos = next;
        }
    }
    return build(p, seed, [&](std::size_t i, std::size_t t) { return samples[t * n + i]; });
}

}  // namespace

Trajectory synthesize_behavior(BehaviorLabel label, const SimProfile& profile, std::uint64_t seed) {
    validate(profile);
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(label) + 100));
    switch (label) {
        case BehaviorLabel::aggregation: return aggregation(profile, seed, rng);
        case BehaviorLabel::cyclic_pursuit: return cyclic_pursuit(profile, seed, rng);
        case BehaviorLabel::dispersal: return dispersal(profile, seed, rng);
        case BehaviorLabel::milling: return milling(profile, seed, rng);
        case BehaviorLabel::wall_following: return wall_following(profile, seed, rng);
        case BehaviorLabel::random: return random_walk(profile, seed, rng);
    }
    throw ValidationError("unknown behaviour label");
}

}  // namespace swarm
