#include "swarm/dataset.hpp"

#include <algorithm>
#include <filesystem>

#include "swarm/byte_io.hpp"
#include "swarm/error.hpp"
#include "swarm/evolution.hpp"
#include "swarm/kernels.hpp"
#include "swarm/rng.hpp"

namespace swarm {

namespace {

std::vector<std::uint8_t> encode_header(const DatasetHeader& h) {
    ByteWriter w;
    w.chars({kDatasetMagic.data(), kDatasetMagic.size()});
    w.u16(h.version);
    w.u32(h.record_count);
    w.u8(h.channels);
    w.u16(h.height);
    w.u16(h.width);
    w.u8(static_cast<std::uint8_t>(h.profile_name.size()));
    w.chars(h.profile_name);
    return w.take();
}

void check_dimensions(int height, int width) {
    if (height < 8 || width < 8 || height > 65535 || width > 65535) {
        throw ValidationError("frame dimensions " + std::to_string(height) + "x" + std::to_string(width) +
                              " outside [8, 65535]");
    }
}

}  // namespace

DatasetRecord make_record(const ControllerGenome& genome, std::uint64_t seed, const FrameStack& stack) {
    DatasetRecord rec;
    const auto genes = genome.genes();
    for (std::size_t i = 0; i < genes.size(); ++i) rec.genome[i] = static_cast<float>(genes[i]);
    rec.seed = seed;
    rec.frames = stack.bytes();
    return rec;
}

DatasetWriter::DatasetWriter(const std::string& path, const std::string& profile_name, int height, int width)
    : path_(path) {
    check_dimensions(height, width);
    if (profile_name.size() > 255) throw ValidationError("profile name longer than 255 bytes");
    header_.profile_name = profile_name;
    header_.height = static_cast<std::uint16_t>(height);
    header_.width = static_cast<std::uint16_t>(width);
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError(path, "cannot open for writing");
    const auto bytes = encode_header(header_);
    out_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out_) throw IoError(path, "write failed");
}

DatasetWriter::~DatasetWriter() {
    if (!closed_) {
        try {
            close();
        } catch (...) {
        }
    }
}

void DatasetWriter::append(const DatasetRecord& record) {
    if (closed_) throw ValidationError("dataset writer already closed");
    if (record.frames.size() != header_.frame_bytes()) {
        throw ValidationError("record has " + std::to_string(record.frames.size()) + " frame bytes, expected " +
                              std::to_string(header_.frame_bytes()));
    }
    if (count_ == UINT32_MAX) throw ValidationError("dataset record count overflow");
    ByteWriter w;
    for (const float g : record.genome) w.f32(g);
    w.u64(record.seed);
    w.bytes(record.frames);
    out_.write(reinterpret_cast<const char*>(w.data().data()), static_cast<std::streamsize>(w.data().size()));
    if (!out_) throw IoError(path_, "write failed");
    ++count_;
}

void DatasetWriter::close() {
    if (closed_) return;
    closed_ = true;
    ByteWriter w;
    w.u32(count_);
    out_.seekp(6);
    out_.write(reinterpret_cast<const char*>(w.data().data()), 4);
    out_.close();
    if (!out_) throw IoError(path_, "failed to finalise header");
}

DatasetReader::DatasetReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError(path, "cannot open for reading");

    std::vector<std::uint8_t> fixed(16);
    fixed.resize(read_up_to(in_, fixed));
    ByteReader r(fixed);
    const auto magic = r.chars(std::min<std::size_t>(4, fixed.size()));
    if (magic.size() < 4 || !std::equal(magic.begin(), magic.end(), kDatasetMagic.begin())) {
        if (magic.size() < 4 && std::equal(magic.begin(), magic.end(), kDatasetMagic.begin())) {
            throw TruncatedError(0, path + ": truncated dataset magic");
        }
        throw BadMagicError(0, path + ": not a dataset file (bad magic)");
    }
    try {
        header_.version = r.u16();
        if (header_.version != kDatasetVersion) {
            throw BadVersionError(4, path + ": unsupported dataset version " + std::to_string(header_.version));
        }
        header_.record_count = r.u32();
        header_.channels = r.u8();
        header_.height = r.u16();
        header_.width = r.u16();
        const std::size_t name_len = r.u8();
        if (header_.channels != FrameStack::kChannels) {
            throw FormatError(10, path + ": expected 3 channels, found " + std::to_string(header_.channels));
        }
        if (header_.height == 0 || header_.width == 0) throw FormatError(11, path + ": zero frame dimension");
        std::vector<std::uint8_t> name(name_len);
        if (read_up_to(in_, name) != name_len) throw TruncatedError(16, "unexpected end of data");
        header_.profile_name.assign(name.begin(), name.end());
    } catch (const TruncatedError& e) {
        throw TruncatedError(e.offset(), path + ": truncated dataset header");
    }
    offset_ = header_.header_size();
}

std::optional<DatasetRecord> DatasetReader::next() {
    if (index_ == header_.record_count) {
        if (in_.peek() != std::ifstream::traits_type::eof()) {
            throw FormatError(offset_, path_ + ": data beyond the " + std::to_string(header_.record_count) +
                                           " declared records");
        }
        return std::nullopt;
    }
    std::vector<std::uint8_t> buf(header_.record_size());
    const std::size_t got = read_up_to(in_, buf);
    if (got != buf.size()) {
        throw TruncatedError(offset_, path_ + ": record " + std::to_string(index_) + " truncated (" +
                                          std::to_string(got) + " of " + std::to_string(buf.size()) + " bytes)");
    }
    ByteReader r(buf, offset_);
    DatasetRecord rec;
    for (auto& g : rec.genome) g = r.f32();
    rec.seed = r.u64();
    const auto frames = r.bytes(header_.frame_bytes());
    rec.frames.assign(frames.begin(), frames.end());
    offset_ += buf.size();
    ++index_;
    return rec;
}

void write_dataset(const std::string& path, const std::string& profile_name, int height, int width,
                   std::span<const DatasetRecord> records) {
    DatasetWriter writer(path, profile_name, height, width);
    for (const auto& rec : records) writer.append(rec);
    writer.close();
}

Dataset read_dataset(const std::string& path) {
    DatasetReader reader(path);
    Dataset ds;
    ds.header = reader.header();
    ds.records.reserve(ds.header.record_count);
    while (auto rec = reader.next()) ds.records.push_back(std::move(*rec));
    return ds;
}

DatasetSummary generate_dataset(int n, const SimProfile& profile, std::uint64_t seed, const std::string& path,
                                int width, int height) {
    if (n < 1) throw ValidationError("dataset size must be >= 1, got " + std::to_string(n));
    validate(profile);
    check_dimensions(height, width);

    const auto bounds = GenomeBounds::from(profile);
    Rng rng(seed);
    std::vector<ControllerGenome> genomes(static_cast<std::size_t>(n));
    std::vector<std::uint64_t> seeds(genomes.size());
    for (std::size_t i = 0; i < genomes.size(); ++i) {
        genomes[i] = sample_genome(bounds, rng);
        seeds[i] = mix_seed(seed, i);
    }

    DatasetWriter writer(path, profile.name, height, width);
    constexpr std::size_t kBlock = 256;
    for (std::size_t begin = 0; begin < genomes.size(); begin += kBlock) {
        const std::size_t count = std::min(kBlock, genomes.size() - begin);
        const auto stacks = kernels::render_stacks(std::span(genomes).subspan(begin, count),
                                                   std::span(seeds).subspan(begin, count), profile, width, height);
        for (std::size_t i = 0; i < count; ++i) {
            writer.append(make_record(genomes[begin + i], seeds[begin + i], stacks[i]));
        }
    }
    writer.close();

    DatasetSummary summary;
    summary.path = path;
    summary.profile_name = profile.name;
    summary.records = static_cast<std::uint32_t>(n);
    summary.height = height;
    summary.width = width;
    summary.bytes = std::filesystem::file_size(path);
    return summary;
}

}  // namespace swarm
