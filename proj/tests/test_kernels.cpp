#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <string>

#include "swarm/kernels.hpp"
#include "swarm/rng.hpp"

using namespace swarm;
namespace k = swarm::kernels;

namespace {

struct Threads {
    explicit Threads(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~Threads() { omp_set_num_threads(saved); }
    int saved;
};

std::vector<double> gaussian(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

bool same_metrics(const std::vector<HandcraftedMetrics>& a, const std::vector<HandcraftedMetrics>& b) { return a == b; }

}  // namespace

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
    for (const int threads : {1, 2, 4, 7}) {
        Threads guard(threads);
        CAPTURE(threads);
        Rng rng(static_cast<std::uint64_t>(threads));

        const auto p = rsrs_profile();
        std::vector<ControllerGenome> genomes;
        std::vector<std::uint64_t> seeds;
        for (int i = 0; i < 9; ++i) {
            genomes.push_back({rng.uniform(-p.v_max, p.v_max), rng.uniform(-p.w_max, p.w_max),
                               rng.uniform(-p.v_max, p.v_max), rng.uniform(-p.w_max, p.w_max)});
            seeds.push_back(rng.next_u64());
        }
        CHECK(same_metrics(k::serial::handcrafted_batch(genomes, seeds, p),
                           k::parallel::handcrafted_batch(genomes, seeds, p)));
        CHECK(k::serial::render_stacks(genomes, seeds, p, 32, 32) ==
              k::parallel::render_stacks(genomes, seeds, p, 32, 32));

        const auto ref = gaussian(rng, 257 * 5), qs = gaussian(rng, 33 * 5);
        const PointSet r{ref, 5}, q{qs, 5};
        CHECK(k::serial::novelty_scores(q, r, 15) == k::parallel::novelty_scores(q, r, 15));
        CHECK(k::serial::cohort_novelty(r, 15) == k::parallel::cohort_novelty(r, 15));
        CHECK(k::serial::pairwise_distances(r) == k::parallel::pairwise_distances(r));

        const std::vector<std::size_t> medoids{3, 50, 101, 200};
        k::MedoidCache cache;
        for (std::size_t o = 0; o < r.size(); ++o) {
            double d1 = 1e300, d2 = 1e300;
            std::size_t s1 = 0;
            for (std::size_t s = 0; s < medoids.size(); ++s) {
                const double d = l2_distance(r.row(o), r.row(medoids[s]));
                if (d < d1) {
                    d2 = d1;
                    d1 = d;
                    s1 = s;
                } else if (d < d2) {
                    d2 = d;
                }
            }
            cache.nearest.push_back(s1);
            cache.d_nearest.push_back(d1);
            cache.d_second.push_back(d2);
        }
        const auto sa = k::serial::swap_deltas(r, medoids, cache);
        const auto sb = k::parallel::swap_deltas(r, medoids, cache);
        REQUIRE(sa.size() == sb.size());
        for (std::size_t i = 0; i < sa.size(); ++i) {
            CHECK(sa[i].slot == sb[i].slot);
            CHECK((sa[i].delta == sb[i].delta || (std::isinf(sa[i].delta) && std::isinf(sb[i].delta))));
        }

        const auto dist = k::serial::pairwise_distances(r);
        std::vector<std::size_t> anchor, positive, negatives;
        for (std::size_t i = 0; i < 60; ++i) {
            for (std::size_t j = 0; j < 60; ++j) {
                if (i != j) {
                    anchor.push_back(i);
                    positive.push_back(j);
                }
            }
        }
        for (std::size_t i = 60; i < 257; ++i) negatives.push_back(i);
        const k::TripletQuery tq{dist, r.size(), anchor, positive, negatives};
        const auto ta = k::serial::count_triplets(tq), tb = k::parallel::count_triplets(tq);
        CHECK(ta.success == tb.success);
        CHECK(ta.total == tb.total);
        CHECK(ta.total == 60u * 59 * 197);
    }
}

TEST_CASE("pairwise distances are symmetric with a zero diagonal") {
    Rng rng(3);
    const auto xs = gaussian(rng, 40 * 3);
    const PointSet pts{xs, 3};
    const auto d = k::pairwise_distances(pts);
    for (std::size_t i = 0; i < 40; ++i) {
        CHECK(d[i * 40 + i] == 0.0);
        for (std::size_t j = 0; j < 40; ++j) {
            CHECK(d[i * 40 + j] == d[j * 40 + i]);
            CHECK(d[i * 40 + j] == l2_distance(pts.row(i), pts.row(j)));
        }
    }
}

TEST_CASE("batch kernels reject mismatched seed lists") {
    const auto p = rsrs_profile();
    const std::vector<ControllerGenome> g(3);
    const std::vector<std::uint64_t> s(2);
    CHECK_THROWS(k::handcrafted_batch(g, s, p));
    CHECK_THROWS(k::render_stacks(g, s, p, 64, 64));
}

TEST_CASE("a failing episode surfaces the lowest-index error") {
    const auto p = rsrs_profile();
    std::vector<ControllerGenome> g(6);
    g[2].v_clear = 1.0;
    g[4].w_seen = 9.0;
    const std::vector<std::uint64_t> s(6, 1);
    Threads guard(4);
    for (const auto policy : {k::ExecPolicy::serial, k::ExecPolicy::parallel}) {
        try {
            k::handcrafted_batch(g, s, p, policy);
            FAIL("expected an error");
        } catch (const std::exception& e) {
            CHECK(std::string(e.what()).find("v_clear") != std::string::npos);
        }
    }
}
