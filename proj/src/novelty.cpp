#include "swarm/novelty.hpp"

#include <algorithm>
#include <fstream>

#include "swarm/byte_io.hpp"
#include "swarm/error.hpp"
#include "swarm/text.hpp"

namespace swarm {

void NoveltyArchive::add(const ArchiveEntry& entry, const BehaviorVector& behavior) {
    if (entries_.empty() && values_.empty() && dim_ == 0) {
        backend_ = behavior.backend;
        dim_ = behavior.dim();
    }
    if (behavior.backend != backend_) throw ValidationError("archive backend mismatch");
    if (behavior.dim() != dim_) {
        throw ValidationError("archive dimension mismatch: " + std::to_string(behavior.dim()) + " vs " +
                              std::to_string(dim_));
    }
    entries_.push_back(entry);
    values_.insert(values_.end(), behavior.values.begin(), behavior.values.end());
}

BehaviorVector NoveltyArchive::behavior(std::size_t i) const {
    const auto v = vector(i);
    return {backend_, std::vector<double>(v.begin(), v.end())};
}

double novelty(std::span<const double> query, const PointSet& points, std::size_t k,
               std::optional<std::size_t> exclude) {
    if (k == 0) throw ValidationError("novelty needs k >= 1");
    if (query.size() != points.dim) throw ValidationError("novelty query dimension mismatch");
    std::vector<double> dist;
    dist.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (exclude && *exclude == i) continue;
        dist.push_back(l2_distance(query, points.row(i)));
    }
    if (dist.empty()) throw ValidationError("novelty of a behaviour against an empty archive");
    const std::size_t kk = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < kk; ++i) sum += dist[i];
    return sum / static_cast<double>(kk);
}

double novelty(const BehaviorVector& b, const NoveltyArchive& archive, std::size_t k) {
    if (!archive.empty() && b.backend != archive.backend()) throw ValidationError("novelty backend mismatch");
    return novelty(b.values, archive.points(), k);
}

std::vector<std::uint8_t> encode_archive(const NoveltyArchive& archive) {
    ByteWriter w;
    w.chars({kArchiveMagic.data(), kArchiveMagic.size()});
    w.u16(kArchiveVersion);
    w.u8(static_cast<std::uint8_t>(archive.backend()));
    w.u32(static_cast<std::uint32_t>(archive.dim()));
    w.u32(static_cast<std::uint32_t>(archive.size()));
    for (std::size_t i = 0; i < archive.size(); ++i) {
        const auto& e = archive.entry(i);
        for (const double g : e.genome.genes()) w.f32(static_cast<float>(g));
        w.u64(e.seed);
        w.u32(e.generation);
        for (const double v : archive.vector(i)) w.f32(static_cast<float>(v));
    }
    return w.take();
}

NoveltyArchive decode_archive(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    if (bytes.size() < 4) {
        if (std::equal(bytes.begin(), bytes.end(), kArchiveMagic.begin())) throw TruncatedError(0, "truncated archive magic");
        throw BadMagicError(0, "not an archive file (bad magic)");
    }
    const auto magic = r.chars(4);
    if (!std::equal(magic.begin(), magic.end(), kArchiveMagic.begin())) {
        throw BadMagicError(0, "not an archive file (bad magic)");
    }
    const auto version = r.u16();
    if (version != kArchiveVersion) throw BadVersionError(4, "unsupported archive version " + std::to_string(version));
    const auto tag = r.u8();
    if (tag > static_cast<std::uint8_t>(Backend::learned)) throw FormatError(6, "unknown backend tag " + std::to_string(tag));
    const std::size_t dim = r.u32();
    const std::size_t count = r.u32();
    const std::size_t header = r.position();
    const std::size_t entry_size = 16 + 8 + 4 + 4 * dim;

    NoveltyArchive archive(static_cast<Backend>(tag), dim);
    BehaviorVector b{static_cast<Backend>(tag), std::vector<double>(dim)};
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t start = header + i * entry_size;
        if (r.remaining() < entry_size) {
            throw TruncatedError(start, "archive entry " + std::to_string(i) + " truncated");
        }
        std::array<double, 4> genes{};
        for (auto& g : genes) g = r.f32();
        ArchiveEntry e;
        e.genome = ControllerGenome::from_genes(genes);
        e.seed = r.u64();
        e.generation = r.u32();
        for (auto& v : b.values) v = r.f32();
        archive.add(e, b);
    }
    if (r.remaining() != 0) throw FormatError(r.offset(), "data beyond the declared archive entries");
    return archive;
}

void write_archive(const NoveltyArchive& archive, const std::string& path) {
    const auto bytes = encode_archive(archive);
    text::write_file(path, {reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

NoveltyArchive read_archive(const std::string& path) {
    const auto content = text::read_file(path);
    try {
        return decode_archive({reinterpret_cast<const std::uint8_t*>(content.data()), content.size()});
    } catch (const BadMagicError& e) {
        throw BadMagicError(e.offset(), path + ": not an archive file (bad magic)");
    } catch (const BadVersionError& e) {
        throw BadVersionError(e.offset(), path + ": unsupported archive version");
    } catch (const TruncatedError& e) {
        throw TruncatedError(e.offset(), path + ": truncated archive");
    }
}

void write_archive_index(const NoveltyArchive& archive, const std::string& path) {
    std::string out = "# swarmdisc archive index v1\n";
    out += "index\tgeneration\tseed\tv_clear\tw_clear\tv_seen\tw_seen\tnovelty\n";
    for (std::size_t i = 0; i < archive.size(); ++i) {
        const auto& e = archive.entry(i);
        out += std::to_string(i) + '\t' + std::to_string(e.generation) + '\t' + std::to_string(e.seed);
        for (const double g : e.genome.genes()) out += '\t' + text::format_double(g);
        out += '\t' + text::format_double(e.novelty) + '\n';
    }
    text::write_file(path, out);
}

}  // namespace swarm
