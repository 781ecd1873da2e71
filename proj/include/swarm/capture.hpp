#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swarm/sim.hpp"

namespace swarm {

// Row-major 8-bit greyscale image. Row 0 is the top edge of the arena
// (largest y).
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    Frame() = default;
    Frame(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {}

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    friend bool operator==(const Frame&, const Frame&) = default;
};

// Three frames from the second half of an episode; the unit input of the
// learned behaviour encoder.
struct FrameStack {
    static constexpr int kChannels = 3;
    std::array<Frame, kChannels> channels;
    std::array<int, kChannels> steps{};

    int width() const noexcept { return channels[0].width; }
    int height() const noexcept { return channels[0].height; }
    // Channel-major concatenation, channels * height * width bytes.
    std::vector<std::uint8_t> bytes() const;
    friend bool operator==(const FrameStack&, const FrameStack&) = default;
};

inline constexpr int kFrameSize = 64;

// Arena mapped onto the full frame, discs drawn at body_radius with 2x2
// supersampling. Overlapping discs are unioned. Throws ValidationError for
// dimensions below 8.
Frame rasterize(std::span<const Vec2> positions, int width, int height, const SimProfile& profile);
Frame rasterize(const WorldState& world, int width, int height, const SimProfile& profile);

// Snapshot indices floor(T/2), floor(3T/4), T-1. Throws ValidationError for T < 2.
std::array<int, FrameStack::kChannels> subsample_indices(int episode_steps);

FrameStack subsample(const Trajectory& traj, int width = kFrameSize, int height = kFrameSize);

// Binary PGM (P5).
void write_pgm(const Frame& frame, const std::string& path);
Frame read_pgm(const std::string& path);

}  // namespace swarm
