#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarm/behavior.hpp"
#include "swarm/point_set.hpp"
#include "swarm/sim.hpp"

namespace swarm {

struct ArchiveEntry {
    ControllerGenome genome;
    std::uint64_t seed = 0;
    std::uint32_t generation = 0;
    double novelty = 0.0;  // score at insertion; not persisted in the binary file
    friend bool operator==(const ArchiveEntry&, const ArchiveEntry&) = default;
};

// Every evaluated behaviour of a discovery run, in insertion order. Vectors
// are stored as one row-major matrix so neighbour queries scan contiguous
// memory.
class NoveltyArchive {
public:
    NoveltyArchive() = default;
    NoveltyArchive(Backend backend, std::size_t dim) : backend_(backend), dim_(dim) {}

    Backend backend() const noexcept { return backend_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    // Throws ValidationError when backend or dimension differ from the archive's.
    void add(const ArchiveEntry& entry, const BehaviorVector& behavior);

    const ArchiveEntry& entry(std::size_t i) const { return entries_[i]; }
    const std::vector<ArchiveEntry>& entries() const noexcept { return entries_; }
    std::span<const double> vector(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
    BehaviorVector behavior(std::size_t i) const;
    PointSet points() const noexcept { return {values_, dim_}; }
    // First `count` entries only.
    PointSet points(std::size_t count) const noexcept { return {std::span(values_).first(count * dim_), dim_}; }

    friend bool operator==(const NoveltyArchive&, const NoveltyArchive&) = default;

private:
    Backend backend_ = Backend::handcrafted;
    std::size_t dim_ = 0;
    std::vector<ArchiveEntry> entries_;
    std::vector<double> values_;
};

// Mean distance from `query` to its k nearest points (all points when k
// exceeds the set). The k smallest distances are summed in ascending order.
// `exclude` removes one index from the neighbourhood (leave-self-out).
// Throws ValidationError on an empty neighbourhood, k == 0 or dimension mismatch.
double novelty(std::span<const double> query, const PointSet& points, std::size_t k,
               std::optional<std::size_t> exclude = std::nullopt);
double novelty(const BehaviorVector& b, const NoveltyArchive& archive, std::size_t k);

// Binary archive, little-endian:
//   "SWAR" | u16 version=1 | u8 backend | u32 dim | u32 count
// then per entry
//   4 x f32 genome | u64 seed | u32 generation | dim x f32
// Genomes and vectors are narrowed to f32 on write.
inline constexpr std::array<char, 4> kArchiveMagic = {'S', 'W', 'A', 'R'};
inline constexpr std::uint16_t kArchiveVersion = 1;

std::vector<std::uint8_t> encode_archive(const NoveltyArchive& archive);
NoveltyArchive decode_archive(std::span<const std::uint8_t> bytes);
void write_archive(const NoveltyArchive& archive, const std::string& path);
NoveltyArchive read_archive(const std::string& path);

// Plain-text index: a version comment line, a header line, then one
// tab-separated line per entry: index, generation, seed, 4 genes, novelty.
void write_archive_index(const NoveltyArchive& archive, const std::string& path);

}  // namespace swarm
