#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>

#include "swarm/error.hpp"
#include "swarm/evaluation.hpp"
#include "swarm/rng.hpp"
#include "test_util.hpp"

using namespace swarm;
using L = BehaviorLabel;

namespace {

LabeledBehavior item(L label, std::vector<double> v) {
    LabeledBehavior lb;
    lb.label = label;
    lb.behavior = {Backend::handcrafted, std::move(v)};
    return lb;
}

std::vector<LabeledBehavior> gaussian_set(Rng& rng, const std::vector<std::pair<L, int>>& classes, std::size_t dim,
                                          double spread = 1.0, double separation = 0.0) {
    std::vector<LabeledBehavior> out;
    int c = 0;
    for (const auto& [label, count] : classes) {
        for (int i = 0; i < count; ++i) {
            std::vector<double> v(dim);
            for (auto& x : v) x = spread * rng.normal();
            v[0] += separation * c;
            out.push_back(item(label, v));
        }
        ++c;
    }
    return out;
}

// Direct transcription of the triplet rule over every (a, p, n).
std::map<std::pair<L, L>, double> oracle(const std::vector<LabeledBehavior>& xs) {
    std::map<L, std::vector<std::size_t>> by;
    for (std::size_t i = 0; i < xs.size(); ++i) by[xs[i].label].push_back(i);
    std::map<std::pair<L, L>, double> out;
    auto d = [&](std::size_t i, std::size_t j) { return l2_distance(xs[i].behavior.values, xs[j].behavior.values); };
    for (const auto& [a_label, members] : by) {
        if (members.size() < 2) continue;
        for (const auto& [n_label, others] : by) {
            std::vector<std::size_t> negs;
            if (n_label == a_label) {
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    if (xs[i].label != a_label) negs.push_back(i);
                }
            } else {
                negs = others;
            }
            double ok = 0, total = 0;
            for (const auto a : members) {
                for (const auto p : members) {
                    if (a == p) continue;
                    for (const auto n : negs) {
                        ok += d(a, p) < d(a, n) ? 1 : 0;
                        total += 1;
                    }
                }
            }
            out[{a_label, n_label}] = ok / total;
        }
    }
    return out;
}

void check_against_oracle(const std::vector<LabeledBehavior>& xs, const ConfusionMatrix& cm) {
    for (const auto& [cell, value] : oracle(xs)) {
        const auto got = cm.at(cell.first, cell.second);
        REQUIRE(got.has_value());
        CHECK(*got == doctest::Approx(value).epsilon(1e-15));
    }
}

}  // namespace

TEST_CASE("label names") {
    for (const auto l : kAllLabels) CHECK(parse_label(to_string(l)) == l);
    CHECK(std::string(to_string(L::cyclic_pursuit)) == "cyclic_pursuit");
    CHECK_THROWS_AS(parse_label("flocking"), ConfigError);
}

TEST_CASE("well separated clusters score 1, identical points score 0") {
    Rng rng(1);
    const auto xs = gaussian_set(rng, {{L::aggregation, 20}, {L::milling, 20}}, 3, 0.01, 100);
    const auto cm = triplet_confusion(xs);
    REQUIRE(cm.size() == 2);
    for (const auto& c : cm.cells) CHECK(*c == 1.0);
    CHECK(cm.triplets[0] == 20u * 19 * 20);

    std::vector<LabeledBehavior> same;
    for (int i = 0; i < 10; ++i) same.push_back(item(i < 5 ? L::dispersal : L::random, {0.5, 0.5}));
    for (const auto& c : triplet_confusion(same).cells) CHECK(*c == 0.0);
}

TEST_CASE("triplet confusion matches the brute-force rule") {
    Rng rng(2);
    for (int trial = 0; trial < 15; ++trial) {
        const auto xs = gaussian_set(
            rng, {{L::aggregation, 2 + static_cast<int>(rng.below(12))}, {L::cyclic_pursuit, 2 + static_cast<int>(rng.below(12))},
                  {L::wall_following, 2 + static_cast<int>(rng.below(12))}},
            4, 1.0, 1.5);
        check_against_oracle(xs, triplet_confusion(xs));
    }
}

TEST_CASE("random embeddings reproduce the 0.5 null") {
    double sum = 0;
    int cells = 0;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        Rng rng(1000 + rep);
        const auto xs = gaussian_set(rng, {{L::aggregation, 100}, {L::milling, 100}}, 5);
        for (const auto& c : triplet_confusion(xs).cells) {
            sum += *c;
            ++cells;
        }
    }
    CHECK(std::abs(sum / cells - 0.5) <= 0.02);
}

TEST_CASE("invariant to example order and to joint isometries") {
    Rng rng(3);
    auto xs = gaussian_set(rng, {{L::aggregation, 15}, {L::milling, 12}, {L::random, 9}}, 2, 1.0, 1.0);
    const auto base = triplet_confusion(xs);

    auto shuffled = xs;
    for (std::size_t j = shuffled.size() - 1; j > 0; --j) std::swap(shuffled[j], shuffled[rng.below(j + 1)]);
    const auto cm_shuffled = triplet_confusion(shuffled);
    CHECK(cm_shuffled.cells == base.cells);

    // Rotation by 90 degrees plus an integer shift keeps every distance exact.
    auto moved = xs;
    for (auto& x : moved) {
        const double a = x.behavior.values[0], b = x.behavior.values[1];
        x.behavior.values = {-b + 4.0, a - 2.0};
    }
    const auto cm_moved = triplet_confusion(moved);
    for (std::size_t i = 0; i < base.cells.size(); ++i) {
        CHECK(*cm_moved.cells[i] == doctest::Approx(*base.cells[i]).epsilon(1e-12));
    }

    // A generic rotation: equal up to rounding of near-ties.
    const double th = 0.7;
    auto rotated = xs;
    for (auto& x : rotated) {
        const double a = x.behavior.values[0], b = x.behavior.values[1];
        x.behavior.values = {std::cos(th) * a - std::sin(th) * b, std::sin(th) * a + std::cos(th) * b};
    }
    const auto cm_rot = triplet_confusion(rotated);
    for (std::size_t i = 0; i < base.cells.size(); ++i) {
        CHECK(*cm_rot.cells[i] == doctest::Approx(*base.cells[i]).epsilon(1e-3));
    }
}

TEST_CASE("a class with one example is a missing row, not zero") {
    Rng rng(4);
    auto xs = gaussian_set(rng, {{L::aggregation, 6}, {L::dispersal, 6}}, 2);
    xs.push_back(item(L::milling, {0, 0}));
    const auto cm = triplet_confusion(xs);
    REQUIRE(cm.size() == 3);
    CHECK_FALSE(cm.at(L::milling, L::milling).has_value());
    CHECK_FALSE(cm.at(L::milling, L::aggregation).has_value());
    CHECK(cm.at(L::aggregation, L::milling).has_value());
    CHECK_FALSE(cm.at(L::cyclic_pursuit, L::milling).has_value());
    CHECK(cm.key_values().find("cell.milling.aggregation=missing") != std::string::npos);
    CHECK(cm.table().find('-') != std::string::npos);
}

TEST_CASE("triplet_confusion preconditions") {
    Rng rng(5);
    const auto one = gaussian_set(rng, {{L::aggregation, 10}}, 2);
    CHECK_THROWS_AS(triplet_confusion(one), ValidationError);
    auto mixed = gaussian_set(rng, {{L::aggregation, 4}, {L::milling, 4}}, 2);
    mixed[3].behavior.values.push_back(1.0);
    CHECK_THROWS_AS(triplet_confusion(mixed), ValidationError);
    auto backends = gaussian_set(rng, {{L::aggregation, 4}, {L::milling, 4}}, 2);
    backends[0].behavior.backend = Backend::learned;
    CHECK_THROWS_AS(triplet_confusion(backends), ValidationError);
}

TEST_CASE("sampling caps large cells and stays close to enumeration") {
    Rng rng(6);
    const auto xs = gaussian_set(rng, {{L::aggregation, 40}, {L::milling, 40}}, 3, 1.0, 1.0);
    const auto full = triplet_confusion(xs);
    TripletOptions opts;
    opts.max_triplets = 20000;
    opts.seed = 9;
    const auto sampled = triplet_confusion(xs, opts);
    CHECK(sampled.sampled[0]);
    CHECK_FALSE(full.sampled[0]);
    CHECK(sampled.triplets[0] == 20000);
    for (std::size_t i = 0; i < full.cells.size(); ++i) {
        CHECK(*sampled.cells[i] == doctest::Approx(*full.cells[i]).epsilon(0.03));
    }
    CHECK(triplet_confusion(xs, opts).cells == sampled.cells);
    opts.policy = kernels::ExecPolicy::serial;
    CHECK(triplet_confusion(xs, opts).cells == sampled.cells);
}

TEST_CASE("calibration files") {
    const ClassifierThresholds defaults;
    CHECK(parse_calibration(format_calibration(defaults)) == defaults);
    CHECK(load_calibration(std::string(SOURCE_DIR) + "/data/classifier_calibration.txt") == defaults);

    const auto t = parse_calibration("version=1\nrotation_min=0.75\n# note\n\nwall_clearance = 0.02\n");
    CHECK(t.rotation_min == 0.75);
    CHECK(t.wall_clearance == 0.02);
    CHECK(t.dispersal_growth == defaults.dispersal_growth);

    CHECK_THROWS_AS(parse_calibration("rotation_min=0.7\n"), ConfigError);
    CHECK_THROWS_AS(parse_calibration("version=2\n"), ConfigError);
    CHECK_THROWS_AS(parse_calibration("version=1\nspin=3\n"), ConfigError);
    CHECK_THROWS_AS(parse_calibration("version=1\nrotation_min=-1\n"), ConfigError);
    CHECK_THROWS_AS(parse_calibration("version=1\nrotation_min=abc\n"), ConfigError);
    CHECK_THROWS_AS(load_calibration("/nonexistent/calibration.txt"), Error);
}

TEST_CASE("synthetic behaviours are classified correctly") {
    for (const auto& p : {rsrs_profile(), default_profile()}) {
        for (const auto label : kAllLabels) {
            for (std::uint64_t seed = 0; seed < 8; ++seed) {
                const auto traj = synthesize_behavior(label, p, seed);
                CHECK(traj.steps() == static_cast<std::size_t>(p.episode_steps));
                CHECK(traj.n_agents == static_cast<std::size_t>(p.n_agents));
                CAPTURE(to_string(label));
                CHECK(classify_behavior(traj, p) == label);
            }
        }
    }
}

TEST_CASE("stillness is random; classification is deterministic and permutation invariant") {
    const auto p = rsrs_profile();
    CHECK(classify_behavior(run_episode({}, p, 1), p) == L::random);
    Rng rng(7);
    for (int i = 0; i < 15; ++i) {
        const ControllerGenome g{rng.uniform(-p.v_max, p.v_max), rng.uniform(-p.w_max, p.w_max),
                                 rng.uniform(-p.v_max, p.v_max), rng.uniform(-p.w_max, p.w_max)};
        const auto traj = run_episode(g, p, rng.next_u64());
        const auto label = classify_behavior(traj, p);
        CHECK(classify_behavior(traj, p) == label);
        Trajectory rev = traj;
        const std::size_t n = traj.n_agents;
        for (std::size_t t = 0; t < traj.length(); ++t) {
            for (std::size_t a = 0; a < n; ++a) {
                rev.positions[t * n + a] = traj.positions[t * n + (n - 1 - a)];
                rev.velocities[t * n + a] = traj.velocities[t * n + (n - 1 - a)];
                rev.headings[t * n + a] = traj.headings[t * n + (n - 1 - a)];
            }
        }
        CHECK(classify_behavior(rev, p) == label);
    }
}

TEST_CASE("synthetic ring features match its geometry") {
    const auto p = rsrs_profile();
    const auto f = behavior_features(synthesize_behavior(L::cyclic_pursuit, p, 3), p);
    CHECK(f.metrics.group_rotation == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(f.metrics.radial_variance < 1e-9);
    CHECK(f.metrics.avg_speed >= 0.9 - 1e-9);
}

TEST_CASE("embedding export round trip") {
    testutil::TempDir dir("emb");
    std::vector<LabeledBehavior> xs;
    for (int i = 0; i < 3; ++i) {
        auto lb = item(kAllLabels[static_cast<std::size_t>(i)], {0.1 * i, 1.0 / 3, -2.5, 1e-17, 7});
        lb.genome = {0.01 * i, -1.0 / 7, 0.02, 1.6};
        xs.push_back(lb);
    }
    export_embeddings(xs, dir.file("e.tsv"));
    const auto rows = read_embeddings(dir.file("e.tsv"));
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(rows[i].tag == to_string(xs[i].label));
        CHECK(rows[i].genome == xs[i].genome);
        CHECK(rows[i].values == xs[i].behavior.values);
    }
    const auto back = to_labeled(rows);
    CHECK(back[2].label == xs[2].label);
    CHECK(back[1].behavior == xs[1].behavior);

    const auto text = testutil::read_text(dir.file("e.tsv"));
    const auto first_row = text.substr(text.find('\n', text.find('\n') + 1) + 1);
    const auto line = first_row.substr(0, first_row.find('\n'));
    CHECK(std::count(line.begin(), line.end(), '\t') == 1 + 4 + 5 - 1);

    NoveltyArchive a(Backend::handcrafted, 2);
    ArchiveEntry e;
    e.generation = 4;
    a.add(e, {Backend::handcrafted, {1, 2}});
    export_embeddings(a, dir.file("a.tsv"));
    const auto arows = read_embeddings(dir.file("a.tsv"));
    REQUIRE(arows.size() == 1);
    CHECK(arows[0].tag == "4");
    CHECK_THROWS_AS(to_labeled(arows), ConfigError);
}

TEST_CASE("empty export fails without creating a file") {
    testutil::TempDir dir("emb0");
    CHECK_THROWS_AS(export_embeddings(std::span<const LabeledBehavior>{}, dir.file("x.tsv")), ValidationError);
    CHECK_FALSE(std::filesystem::exists(dir.file("x.tsv")));
    CHECK_THROWS_AS(export_embeddings(NoveltyArchive(Backend::handcrafted, 5), dir.file("y.tsv")), ValidationError);
    CHECK_FALSE(std::filesystem::exists(dir.file("y.tsv")));
}

TEST_CASE("malformed embedding tables") {
    CHECK_THROWS_AS(parse_embeddings("tag\tv\n"), BadVersionError);
    const std::string head = "# swarmdisc embeddings v1\ntag\tv_clear\tw_clear\tv_seen\tw_seen\tb0\n";
    CHECK(parse_embeddings(head).empty());
    try {
        parse_embeddings(head + "milling\t0\t0\t0\tx\t1\n");
        FAIL("expected a format error");
    } catch (const FormatError& e) {
        CHECK(e.offset() == head.size());
    }
    CHECK_THROWS_AS(parse_embeddings(head + "milling\t0\t0\t0\t0\n"), FormatError);
    CHECK_THROWS_AS(parse_embeddings(head + "milling\t0\t0\t0\t0\t1\t2\n"), FormatError);
}
