#include "swarm/capture.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "swarm/error.hpp"

namespace swarm {

namespace {

// Intensity for 0..4 covered subsamples, round(255 * n / 4).
constexpr std::array<std::uint8_t, 5> kCoverage = {0, 64, 128, 191, 255};
constexpr std::array<double, 2> kSubOffsets = {0.25, 0.75};

}  // namespace

std::vector<std::uint8_t> FrameStack::bytes() const {
    std::vector<std::uint8_t> out;
    out.reserve(channels[0].pixels.size() * kChannels);
    for (const auto& c : channels) out.insert(out.end(), c.pixels.begin(), c.pixels.end());
    return out;
}

Frame rasterize(std::span<const Vec2> positions, int width, int height, const SimProfile& profile) {
    if (width < 8 || height < 8) {
        throw ValidationError("frame must be at least 8x8, got " + std::to_string(width) + "x" + std::to_string(height));
    }
    const double sx = width / profile.arena_width;    // pixels per metre
    const double sy = height / profile.arena_height;
    const double r = profile.body_radius;
    const double r2 = r * r;

    // Bit k of mask marks subsample k as covered; union over agents.
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(width) * height, 0);
    for (const Vec2 c : positions) {
        const int x0 = std::max(0, static_cast<int>(std::floor((c.x - r) * sx)));
        const int x1 = std::min(width - 1, static_cast<int>(std::floor((c.x + r) * sx)));
        const int y0 = std::max(0, static_cast<int>(std::floor((profile.arena_height - (c.y + r)) * sy)));
        const int y1 = std::min(height - 1, static_cast<int>(std::floor((profile.arena_height - (c.y - r)) * sy)));
        for (int py = y0; py <= y1; ++py) {
            for (int px = x0; px <= x1; ++px) {
                std::uint8_t bits = 0;
                int k = 0;
                for (const double oy : kSubOffsets) {
                    const double ay = profile.arena_height - (py + oy) / sy;
                    for (const double ox : kSubOffsets) {
                        const double ax = (px + ox) / sx;
                        const double dx = ax - c.x;
                        const double dy = ay - c.y;
                        if (dx * dx + dy * dy <= r2) bits |= static_cast<std::uint8_t>(1u << k);
                        ++k;
                    }
                }
                mask[static_cast<std::size_t>(py) * width + px] |= bits;
            }
        }
    }

    Frame frame(width, height);
    for (std::size_t i = 0; i < mask.size(); ++i) frame.pixels[i] = kCoverage[std::popcount(mask[i])];
    return frame;
}

Frame rasterize(const WorldState& world, int width, int height, const SimProfile& profile) {
    std::vector<Vec2> positions;
    positions.reserve(world.agents.size());
    for (const auto& a : world.agents) positions.push_back(a.position);
    return rasterize(positions, width, height, profile);
}

std::array<int, FrameStack::kChannels> subsample_indices(int episode_steps) {
    if (episode_steps < 2) {
        throw ValidationError("subsampling needs at least 2 episode steps, got " + std::to_string(episode_steps));
    }
    const int t = episode_steps;
    return {t / 2, (3 * t) / 4, t - 1};
}

FrameStack subsample(const Trajectory& traj, int width, int height) {
    const auto idx = subsample_indices(static_cast<int>(traj.steps()));
    FrameStack stack;
    for (int c = 0; c < FrameStack::kChannels; ++c) {
        stack.steps[c] = idx[c];
        stack.channels[c] = rasterize(traj.positions_at(static_cast<std::size_t>(idx[c])), width, height, traj.profile);
    }
    return stack;
}

void write_pgm(const Frame& frame, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    out << "P5\n" << frame.width << ' ' << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()), static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) throw IoError(path, "write failed");
}

Frame read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255) throw FormatError(0, path + ": not an 8-bit P5 greymap");
    in.get();
    Frame frame(w, h);
    in.read(reinterpret_cast<char*>(frame.pixels.data()), static_cast<std::streamsize>(frame.pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != frame.pixels.size()) {
        throw TruncatedError(static_cast<std::uint64_t>(in.gcount()), path + ": truncated pixel data");
    }
    return frame;
}

}  // namespace swarm
