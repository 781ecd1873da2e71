#pragma once

#include <cmath>
#include <string>
#include <string_view>

namespace swarm {

// Numerical slack for projection-based collision resolution (metres).
inline constexpr double kPenetrationTolerance = 1e-6;

// Physics and sensing parameters of one simulated environment. The two
// built-in instances are the calibrated "rsrs" profile (measured velocity caps,
// 2 m time-of-flight range, wall/robot friction) and the uncalibrated
// "default" profile (hardware maximum velocities, unlimited sensing,
// frictionless contacts).
struct SimProfile {
    std::string name = "rsrs";
    double v_max = 0.09;                  // m/s
    double w_max = 1.6;                   // rad/s
    double sensor_range = 2.0;            // m; +inf means bounded only by the arena
    double body_radius = 0.07;            // m, bump shield included
    double friction_mu = 0.8;             // tangential friction at contacts, [0, 1]
    double arena_width = 1.70;            // m
    double arena_height = 1.42;           // m
    bool wall_height_blocks_sensing = false;
    double dt = 0.1;                      // s
    int episode_steps = 600;
    int n_agents = 8;

    bool unlimited_sensing() const noexcept { return std::isinf(sensor_range); }
    // Half the arena diagonal; the length scale used to normalise metrics.
    double half_diagonal() const noexcept {
        return 0.5 * std::sqrt(arena_width * arena_width + arena_height * arena_height);
    }

    friend bool operator==(const SimProfile&, const SimProfile&) = default;
};

SimProfile rsrs_profile();
SimProfile default_profile();

// Throws ConfigError if `name` is not "rsrs" or "default".
SimProfile builtin_profile(std::string_view name);
bool is_builtin_profile(std::string_view name) noexcept;

// Throws ConfigError describing the first violated invariant.
void validate(const SimProfile& profile);

// Flat key=value text, one SimProfile field per line. Keys absent from the
// text keep the "rsrs" values; unknown keys are an error. The result is
// validated.
SimProfile parse_profile(std::string_view content, std::string name, const std::string& source = "<profile>");
SimProfile load_profile(const std::string& path);
std::string format_profile(const SimProfile& profile);

// Resolves a built-in name, an existing file path, or `<profile_dir>/<name>.profile`
// (in that order). An empty profile_dir falls back to $SWARMDISC_PROFILE_DIR.
SimProfile resolve_profile(const std::string& name_or_path, const std::string& profile_dir = {});

}  // namespace swarm
