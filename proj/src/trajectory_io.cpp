#include "swarm/trajectory_io.hpp"

#include <algorithm>

#include "swarm/byte_io.hpp"
#include "swarm/error.hpp"
#include "swarm/text.hpp"

namespace swarm {

namespace {
constexpr std::size_t kAgentRecord = 6 * 8 + 1;
}

std::vector<std::uint8_t> encode_trajectory(const Trajectory& traj) {
    ByteWriter w;
    w.chars({kTrajectoryMagic.data(), kTrajectoryMagic.size()});
    w.u16(kTrajectoryVersion);
    const std::string profile = format_profile(traj.profile);
    w.u32(static_cast<std::uint32_t>(profile.size()));
    w.chars(profile);
    w.u16(static_cast<std::uint16_t>(traj.profile.name.size()));
    w.chars(traj.profile.name);
    for (const double g : traj.genome.genes()) w.f64(g);
    w.u64(traj.seed);
    w.u32(static_cast<std::uint32_t>(traj.n_agents));
    w.u32(static_cast<std::uint32_t>(traj.length()));
    for (std::size_t k = 0; k < traj.positions.size(); ++k) {
        w.f64(traj.positions[k].x);
        w.f64(traj.positions[k].y);
        w.f64(traj.headings[k]);
        w.f64(traj.velocities[k].linear.x);
        w.f64(traj.velocities[k].linear.y);
        w.f64(traj.velocities[k].angular);
        w.u8(traj.sensors[k]);
    }
    return w.take();
}

Trajectory decode_trajectory(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    if (bytes.size() < 4 || !std::equal(kTrajectoryMagic.begin(), kTrajectoryMagic.end(), bytes.begin())) {
        throw BadMagicError(0, "not a trajectory file (bad magic)");
    }
    r.chars(4);
    const auto version = r.u16();
    if (version != kTrajectoryVersion) {
        throw BadVersionError(4, "unsupported trajectory version " + std::to_string(version));
    }
    const std::uint64_t profile_at = r.offset();
    const std::string profile_text = r.chars(r.u32());
    const std::string name = r.chars(r.u16());
    Trajectory traj;
    try {
        traj.profile = parse_profile(profile_text, name, "<embedded profile>");
    } catch (const ConfigError& e) {
        throw FormatError(profile_at, std::string("embedded profile: ") + e.what());
    }
    std::array<double, ControllerGenome::kGenes> genes{};
    for (auto& g : genes) g = r.f64();
    traj.genome = ControllerGenome::from_genes(genes);
    traj.seed = r.u64();
    traj.n_agents = r.u32();
    const std::size_t snapshots = r.u32();
    const std::size_t header = r.position();
    const std::size_t records = traj.n_agents * snapshots;
    if (r.remaining() / kAgentRecord < records) {
        const std::size_t whole = r.remaining() / kAgentRecord;
        throw TruncatedError(header + whole * kAgentRecord, "trajectory record " + std::to_string(whole) + " truncated");
    }
    traj.reserve(snapshots);
    for (std::size_t k = 0; k < records; ++k) {
        const double x = r.f64();
        const double y = r.f64();
        traj.positions.push_back({x, y});
        traj.headings.push_back(r.f64());
        const double vx = r.f64();
        const double vy = r.f64();
        const double w = r.f64();
        traj.velocities.push_back({{vx, vy}, w});
        traj.sensors.push_back(r.u8());
    }
    if (r.remaining() != 0) throw FormatError(r.offset(), "data beyond the declared trajectory");
    return traj;
}

void write_trajectory(const Trajectory& traj, const std::string& path) {
    const auto bytes = encode_trajectory(traj);
    text::write_file(path, {reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

Trajectory read_trajectory(const std::string& path) {
    const auto content = text::read_file(path);
    return decode_trajectory({reinterpret_cast<const std::uint8_t*>(content.data()), content.size()});
}

}  // namespace swarm
