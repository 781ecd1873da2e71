#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarm/capture.hpp"
#include "swarm/profile.hpp"

namespace swarm {

// Training corpus file. Little-endian layout:
//   "SWBD" | u16 version=1 | u32 record_count | u8 channels=3 | u16 height |
//   u16 width | u8 name_len | name bytes
// then record_count records of
//   4 x f32 genome | u64 seed | channels*height*width bytes
inline constexpr std::array<char, 4> kDatasetMagic = {'S', 'W', 'B', 'D'};
inline constexpr std::uint16_t kDatasetVersion = 1;

struct DatasetHeader {
    std::uint16_t version = kDatasetVersion;
    std::uint32_t record_count = 0;
    std::uint8_t channels = FrameStack::kChannels;
    std::uint16_t height = kFrameSize;
    std::uint16_t width = kFrameSize;
    std::string profile_name;

    std::size_t header_size() const noexcept { return 16 + profile_name.size(); }
    std::size_t frame_bytes() const noexcept { return std::size_t{channels} * height * width; }
    std::size_t record_size() const noexcept { return 4 * 4 + 8 + frame_bytes(); }
    friend bool operator==(const DatasetHeader&, const DatasetHeader&) = default;
};

struct DatasetRecord {
    std::array<float, 4> genome{};
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> frames;
    friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

DatasetRecord make_record(const ControllerGenome& genome, std::uint64_t seed, const FrameStack& stack);

// Single-owner streaming writer. The record count is patched into the header
// by close(); the destructor closes if the caller did not.
class DatasetWriter {
public:
    DatasetWriter(const std::string& path, const std::string& profile_name, int height, int width);
    ~DatasetWriter();
    DatasetWriter(const DatasetWriter&) = delete;
    DatasetWriter& operator=(const DatasetWriter&) = delete;

    // Throws ValidationError when the frame payload size does not match.
    void append(const DatasetRecord& record);
    void close();
    std::uint32_t count() const noexcept { return count_; }

private:
    std::string path_;
    std::ofstream out_;
    DatasetHeader header_;
    std::uint32_t count_ = 0;
    bool closed_ = false;
};

// Record-at-a-time reader. Errors carry the byte offset: BadMagicError (0),
// BadVersionError (4), TruncatedError (start of the incomplete header field
// or record), FormatError for bytes beyond the declared records.
class DatasetReader {
public:
    explicit DatasetReader(const std::string& path);

    const DatasetHeader& header() const noexcept { return header_; }
    std::optional<DatasetRecord> next();

private:
    std::string path_;
    std::ifstream in_;
    DatasetHeader header_;
    std::uint32_t index_ = 0;
    std::uint64_t offset_ = 0;
};

void write_dataset(const std::string& path, const std::string& profile_name, int height, int width,
                   std::span<const DatasetRecord> records);

struct Dataset {
    DatasetHeader header;
    std::vector<DatasetRecord> records;
};
Dataset read_dataset(const std::string& path);

struct DatasetSummary {
    std::string path;
    std::string profile_name;
    std::uint32_t records = 0;
    int height = 0;
    int width = 0;
    std::uint64_t bytes = 0;
};

// Samples n genomes uniformly over the profile's controller box, simulates
// each from its own derived spawn seed, and writes the frame stacks in genome
// order. Deterministic in `seed` regardless of thread count.
DatasetSummary generate_dataset(int n, const SimProfile& profile, std::uint64_t seed, const std::string& path,
                                int width = kFrameSize, int height = kFrameSize);

}  // namespace swarm
