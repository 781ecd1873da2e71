#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swarm/sim.hpp"

namespace swarm {

// Binary trajectory file, little-endian, lossless:
//   "SWTR" | u16 version=1 | u32 profile_text_len | profile key=value text
//   | u16 name_len | name | 4 x f64 genome | u64 seed | u32 n_agents | u32 snapshots
// then per snapshot, per agent:
//   f64 x | f64 y | f64 heading | f64 vx | f64 vy | f64 w | u8 sensor
inline constexpr std::array<char, 4> kTrajectoryMagic = {'S', 'W', 'T', 'R'};
inline constexpr std::uint16_t kTrajectoryVersion = 1;

std::vector<std::uint8_t> encode_trajectory(const Trajectory& traj);
// Throws BadMagicError, BadVersionError, TruncatedError, FormatError.
Trajectory decode_trajectory(std::span<const std::uint8_t> bytes);
void write_trajectory(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory(const std::string& path);

}  // namespace swarm
