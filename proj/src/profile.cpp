#include "swarm/profile.hpp"

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>

#include "swarm/error.hpp"
#include "swarm/text.hpp"

namespace swarm {

SimProfile rsrs_profile() { return SimProfile{}; }

SimProfile default_profile() {
    SimProfile p;
    p.name = "default";
    p.v_max = 0.20;
    p.w_max = 3.0;
    p.sensor_range = INFINITY;
    p.friction_mu = 0.0;
    return p;
}

bool is_builtin_profile(std::string_view name) noexcept { return name == "rsrs" || name == "default"; }

SimProfile builtin_profile(std::string_view name) {
    if (name == "rsrs") return rsrs_profile();
    if (name == "default") return default_profile();
    throw ConfigError("unknown built-in profile '" + std::string(name) + "'");
}

void validate(const SimProfile& p) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("invalid profile: ") + what);
    };
    require(p.v_max > 0 && std::isfinite(p.v_max), "v_max must be positive and finite");
    require(p.w_max > 0 && std::isfinite(p.w_max), "w_max must be positive and finite");
    require(p.sensor_range > 0, "sensor_range must be positive");
    require(p.body_radius > 0 && std::isfinite(p.body_radius), "body_radius must be positive and finite");
    require(p.friction_mu >= 0 && p.friction_mu <= 1, "friction_mu must lie in [0, 1]");
    require(p.arena_width > 2 * p.body_radius && std::isfinite(p.arena_width), "arena_width too small");
    require(p.arena_height > 2 * p.body_radius && std::isfinite(p.arena_height), "arena_height too small");
    require(!p.wall_height_blocks_sensing, "wall_height_blocks_sensing must be false (walls are below the sensor)");
    require(p.dt > 0 && std::isfinite(p.dt), "dt must be positive and finite");
    require(p.episode_steps >= 1, "episode_steps must be >= 1");
    require(p.n_agents >= 0, "n_agents must be non-negative");
    // Spawn lattice is 0.75 m x 0.50 m around the arena centre.
    require(p.arena_width >= 0.75 + 2 * p.body_radius && p.arena_height >= 0.50 + 2 * p.body_radius,
            "arena cannot contain the spawn lattice");
    require(p.body_radius < 0.125, "body_radius must be below half the spawn spacing (0.125 m)");
}

namespace {

using Setter = std::function<void(SimProfile&, const std::string&)>;

double parse_real(const std::string& key, const std::string& value) {
    double out;
    if (!text::parse_double(value, out)) throw ConfigError("profile key '" + key + "': not a number: '" + value + "'");
    return out;
}

int parse_count(const std::string& key, const std::string& value) {
    long long out;
    if (!text::parse_int(value, out) || out < -2147483647LL || out > 2147483647LL) {
        throw ConfigError("profile key '" + key + "': not an integer: '" + value + "'");
    }
    return static_cast<int>(out);
}

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"v_max", [](SimProfile& p, const std::string& v) { p.v_max = parse_real("v_max", v); }},
        {"w_max", [](SimProfile& p, const std::string& v) { p.w_max = parse_real("w_max", v); }},
        {"sensor_range",
         [](SimProfile& p, const std::string& v) {
             p.sensor_range = (v == "unlimited") ? INFINITY : parse_real("sensor_range", v);
         }},
        {"body_radius", [](SimProfile& p, const std::string& v) { p.body_radius = parse_real("body_radius", v); }},
        {"friction_mu", [](SimProfile& p, const std::string& v) { p.friction_mu = parse_real("friction_mu", v); }},
        {"arena_width", [](SimProfile& p, const std::string& v) { p.arena_width = parse_real("arena_width", v); }},
        {"arena_height", [](SimProfile& p, const std::string& v) { p.arena_height = parse_real("arena_height", v); }},
        {"wall_height_blocks_sensing",
         [](SimProfile& p, const std::string& v) {
             if (v == "true" || v == "1") p.wall_height_blocks_sensing = true;
             else if (v == "false" || v == "0") p.wall_height_blocks_sensing = false;
             else throw ConfigError("profile key 'wall_height_blocks_sensing': expected true/false");
         }},
        {"dt", [](SimProfile& p, const std::string& v) { p.dt = parse_real("dt", v); }},
        {"episode_steps", [](SimProfile& p, const std::string& v) { p.episode_steps = parse_count("episode_steps", v); }},
        {"n_agents", [](SimProfile& p, const std::string& v) { p.n_agents = parse_count("n_agents", v); }},
    };
    return table;
}

}  // namespace

SimProfile parse_profile(std::string_view content, std::string name, const std::string& source) {
    SimProfile p = rsrs_profile();
    p.name = std::move(name);
    for (const auto& kv : text::parse_key_values(content, source)) {
        const auto it = setters().find(kv.key);
        if (it == setters().end()) {
            throw ConfigError(source + ":" + std::to_string(kv.line) + ": unknown profile key '" + kv.key + "'");
        }
        it->second(p, kv.value);
    }
    validate(p);
    return p;
}

SimProfile load_profile(const std::string& path) {
    const auto content = text::read_file(path);
    return parse_profile(content, std::filesystem::path(path).stem().string(), path);
}

std::string format_profile(const SimProfile& p) {
    std::string out;
    auto line = [&out](const char* key, const std::string& value) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    };
    line("v_max", text::format_double(p.v_max));
    line("w_max", text::format_double(p.w_max));
    line("sensor_range", p.unlimited_sensing() ? "unlimited" : text::format_double(p.sensor_range));
    line("body_radius", text::format_double(p.body_radius));
    line("friction_mu", text::format_double(p.friction_mu));
    line("arena_width", text::format_double(p.arena_width));
    line("arena_height", text::format_double(p.arena_height));
    line("wall_height_blocks_sensing", p.wall_height_blocks_sensing ? "true" : "false");
    line("dt", text::format_double(p.dt));
    line("episode_steps", std::to_string(p.episode_steps));
    line("n_agents", std::to_string(p.n_agents));
    return out;
}

SimProfile resolve_profile(const std::string& name_or_path, const std::string& profile_dir) {
    if (is_builtin_profile(name_or_path)) return builtin_profile(name_or_path);
    namespace fs = std::filesystem;
    if (fs::is_regular_file(name_or_path)) return load_profile(name_or_path);
    std::string dir = profile_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("SWARMDISC_PROFILE_DIR")) dir = env;
    }
    if (!dir.empty()) {
        const auto candidate = fs::path(dir) / (name_or_path + ".profile");
        if (fs::is_regular_file(candidate)) return load_profile(candidate.string());
    }
    throw ConfigError("profile '" + name_or_path + "' is neither built-in nor a readable file");
}

}  // namespace swarm
