#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "swarm/error.hpp"
#include "swarm/kernels.hpp"
#include "swarm/novelty.hpp"
#include "swarm/rng.hpp"
#include "test_util.hpp"

using namespace swarm;

namespace {

NoveltyArchive make_archive(std::size_t dim, const std::vector<std::vector<double>>& pts) {
    NoveltyArchive a(Backend::handcrafted, dim);
    for (const auto& p : pts) a.add({}, {Backend::handcrafted, p});
    return a;
}

// Sort every distance, average the first k.
double oracle(const std::vector<double>& q, const NoveltyArchive& a, std::size_t k) {
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i) d.push_back(l2_distance(q, a.vector(i)));
    std::sort(d.begin(), d.end());
    k = std::min(k, d.size());
    double sum = 0;
    for (std::size_t i = 0; i < k; ++i) sum += d[i];
    return sum / static_cast<double>(k);
}

std::vector<double> random_point(Rng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.normal();
    return v;
}

// Values exactly representable in f32 so the binary round trip is lossless.
std::vector<double> f32_point(Rng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    for (auto& x : v) x = static_cast<float>(rng.normal());
    return v;
}

}  // namespace

TEST_CASE("novelty examples") {
    const auto a = make_archive(2, {{1, 0}, {0, 1}, {3, 4}});
    CHECK(novelty({Backend::handcrafted, {0, 0}}, a, 2) == 1.0);
    CHECK(novelty({Backend::handcrafted, {0, 0}}, make_archive(2, {{0, 0}}), 1) == 0.0);
    CHECK(novelty({Backend::handcrafted, {0, 0}}, make_archive(2, {{3, 4}}), 15) == 5.0);
}

TEST_CASE("novelty errors") {
    const NoveltyArchive empty(Backend::handcrafted, 2);
    CHECK_THROWS_AS(novelty({Backend::handcrafted, {0, 0}}, empty, 3), ValidationError);
    const auto a = make_archive(2, {{1, 0}});
    CHECK_THROWS_AS(novelty({Backend::handcrafted, {0, 0}}, a, 0), ValidationError);
    CHECK_THROWS_AS(novelty({Backend::handcrafted, {0, 0, 0}}, a, 1), ValidationError);
    CHECK_THROWS_AS(novelty({Backend::learned, {0, 0}}, a, 1), ValidationError);
    NoveltyArchive b(Backend::handcrafted, 2);
    CHECK_THROWS_AS(b.add({}, {Backend::handcrafted, {1, 2, 3}}), ValidationError);
    // Leave-self-out of the only point leaves nothing.
    const std::vector<double> q{1, 0};
    CHECK_THROWS_AS(novelty(q, a.points(), 1, 0), ValidationError);
}

TEST_CASE("novelty equals the sort-all oracle exactly") {
    Rng rng(123);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t dim = 1 + rng.below(6);
        const std::size_t n = 1 + rng.below(400);
        const std::size_t k = 1 + rng.below(20);
        NoveltyArchive a(Backend::handcrafted, dim);
        for (std::size_t i = 0; i < n; ++i) a.add({}, {Backend::handcrafted, random_point(rng, dim)});
        const auto q = random_point(rng, dim);
        CHECK(novelty({Backend::handcrafted, q}, a, k) == oracle(q, a, k));
    }
}

TEST_CASE("leave-self-out matches the oracle on the archive without that point") {
    Rng rng(9);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 30; ++i) pts.push_back(random_point(rng, 3));
    const auto a = make_archive(3, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto rest = pts;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        CHECK(novelty(pts[i], a.points(), 5, i) == oracle(pts[i], make_archive(3, rest), 5));
    }
    const auto cohort = kernels::cohort_novelty(a.points(), 5, kernels::ExecPolicy::serial);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(cohort[i] == novelty(pts[i], a.points(), 5, i));
}

TEST_CASE("adding a duplicate of the query never increases novelty") {
    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t dim = 1 + rng.below(5);
        NoveltyArchive a(Backend::handcrafted, dim);
        const std::size_t n = 1 + rng.below(50);
        for (std::size_t i = 0; i < n; ++i) a.add({}, {Backend::handcrafted, random_point(rng, dim)});
        const BehaviorVector b{Backend::handcrafted, random_point(rng, dim)};
        const std::size_t k = 1 + rng.below(15);
        const double before = novelty(b, a, k);
        a.add({}, b);
        CHECK(novelty(b, a, k) <= before);
    }
}

TEST_CASE("archive binary round trip") {
    testutil::TempDir dir("arch");
    Rng rng(2);
    NoveltyArchive a(Backend::handcrafted, 5);
    for (std::uint32_t i = 0; i < 25; ++i) {
        ArchiveEntry e;
        e.genome = {static_cast<float>(rng.uniform(-0.09, 0.09)), static_cast<float>(rng.uniform(-1.6, 1.6)),
                    static_cast<float>(rng.uniform(-0.09, 0.09)), static_cast<float>(rng.uniform(-1.6, 1.6))};
        e.seed = rng.next_u64();
        e.generation = i / 5;
        a.add(e, {Backend::handcrafted, f32_point(rng, 5)});
    }
    write_archive(a, dir.file("a.swar"));
    CHECK(read_archive(dir.file("a.swar")) == a);

    NoveltyArchive learned(Backend::learned, 3);
    learned.add({}, {Backend::learned, {0.5, -0.25, 1}});
    const auto back = decode_archive(encode_archive(learned));
    CHECK(back.backend() == Backend::learned);
    CHECK(back == learned);

    const NoveltyArchive empty(Backend::handcrafted, 5);
    CHECK(decode_archive(encode_archive(empty)) == empty);
}

TEST_CASE("novelty scores are not persisted and vectors narrow to f32") {
    NoveltyArchive a(Backend::handcrafted, 1);
    ArchiveEntry e;
    e.novelty = 3.5;
    a.add(e, {Backend::handcrafted, {0.1}});
    const auto back = decode_archive(encode_archive(a));
    CHECK(back.entry(0).novelty == 0.0);
    CHECK(back.vector(0)[0] == static_cast<double>(0.1f));
}

TEST_CASE("archive damage is reported with offsets") {
    Rng rng(6);
    NoveltyArchive a(Backend::handcrafted, 5);
    for (int i = 0; i < 4; ++i) a.add({}, {Backend::handcrafted, f32_point(rng, 5)});
    const auto bytes = encode_archive(a);
    const std::size_t entry = 4 * 4 + 8 + 4 + 5 * 4;
    const std::size_t header = bytes.size() - 4 * entry;
    CHECK(header == 15);

    auto cut = bytes;
    cut.resize(header + 2 * entry + 7);
    try {
        decode_archive(cut);
        FAIL("expected truncation");
    } catch (const TruncatedError& e) {
        CHECK(e.offset() == header + 2 * entry);
    }
    auto short_header = bytes;
    short_header.resize(8);
    CHECK_THROWS_AS(decode_archive(short_header), TruncatedError);
    auto magic = bytes;
    magic[3] = 'Z';
    CHECK_THROWS_AS(decode_archive(magic), BadMagicError);
    auto version = bytes;
    version[4] = 7;
    CHECK_THROWS_AS(decode_archive(version), BadVersionError);
    auto extra = bytes;
    extra.push_back(0);
    CHECK_THROWS_AS(decode_archive(extra), FormatError);
}

TEST_CASE("archive index file") {
    testutil::TempDir dir("idx");
    NoveltyArchive a(Backend::handcrafted, 2);
    ArchiveEntry e;
    e.genome = {0.01, -0.5, 0.02, 1.25};
    e.seed = 77;
    e.generation = 3;
    e.novelty = 0.125;
    a.add(e, {Backend::handcrafted, {1, 2}});
    a.add(e, {Backend::handcrafted, {3, 4}});
    write_archive_index(a, dir.file("i.tsv"));
    const auto text = testutil::read_text(dir.file("i.tsv"));
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        const auto end = text.find('\n', start);
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    REQUIRE(lines.size() == 4);
    CHECK(lines[0][0] == '#');
    CHECK(std::count(lines[1].begin(), lines[1].end(), '\t') == 7);
    CHECK(lines[3].rfind("1\t3\t77\t", 0) == 0);
}

TEST_CASE("novelty kernels agree across policies") {
    Rng rng(14);
    std::vector<double> ref, qs;
    for (int i = 0; i < 300 * 5; ++i) ref.push_back(rng.normal());
    for (int i = 0; i < 40 * 5; ++i) qs.push_back(rng.normal());
    const PointSet r{ref, 5}, q{qs, 5};
    CHECK(kernels::novelty_scores(q, r, 15, kernels::ExecPolicy::serial) ==
          kernels::novelty_scores(q, r, 15, kernels::ExecPolicy::parallel));
    CHECK(kernels::cohort_novelty(r, 15, kernels::ExecPolicy::serial) ==
          kernels::cohort_novelty(r, 15, kernels::ExecPolicy::parallel));
}
