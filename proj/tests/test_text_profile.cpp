#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>

#include "swarm/error.hpp"
#include "swarm/profile.hpp"
#include "swarm/rng.hpp"
#include "swarm/text.hpp"
#include "test_util.hpp"

using namespace swarm;

TEST_CASE("format_double round-trips exactly") {
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        const double x = std::ldexp(rng.uniform(-1, 1), static_cast<int>(rng.below(80)) - 40);
        double back = 0;
        REQUIRE(text::parse_double(text::format_double(x), back));
        CHECK(back == x);
    }
    CHECK(text::format_double(0.1) == "0.1");
    CHECK(text::format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("whole-string numeric parses reject trailing garbage") {
    double d;
    long long i;
    std::uint64_t u;
    CHECK_FALSE(text::parse_double("1.5x", d));
    CHECK_FALSE(text::parse_double("", d));
    CHECK_FALSE(text::parse_int("12x", i));
    CHECK(text::parse_int("-12", i));
    CHECK(i == -12);
    CHECK(text::parse_u64("18446744073709551615", u));
    CHECK(u == UINT64_MAX);
    CHECK_FALSE(text::parse_u64("-1", u));
}

TEST_CASE("key=value parsing") {
    const auto kv = text::parse_key_values("# comment\n\n a = 1 \nb=two\n", "t");
    REQUIRE(kv.size() == 2);
    CHECK(kv[0].key == "a");
    CHECK(kv[0].value == "1");
    CHECK(kv[0].line == 3);
    CHECK(kv[1].value == "two");
    CHECK_THROWS_AS(text::parse_key_values("a=1\na=2\n", "t"), ConfigError);
    CHECK_THROWS_AS(text::parse_key_values("no equals sign\n", "t"), ConfigError);
}

TEST_CASE("built-in profiles") {
    const auto r = rsrs_profile();
    CHECK(r.name == "rsrs");
    CHECK(r.v_max == 0.09);
    CHECK(r.w_max == 1.6);
    CHECK(r.sensor_range == 2.0);
    CHECK(r.friction_mu == 0.8);
    CHECK(r.dt == 0.1);
    CHECK(r.episode_steps == 600);
    CHECK(r.n_agents == 8);
    const auto d = default_profile();
    CHECK(d.v_max == 0.20);
    CHECK(d.w_max == 3.0);
    CHECK(d.unlimited_sensing());
    CHECK(d.friction_mu == 0.0);
    CHECK_NOTHROW(validate(r));
    CHECK_NOTHROW(validate(d));
    CHECK_THROWS_AS(builtin_profile("nope"), ConfigError);
}

TEST_CASE("profile text round trip") {
    for (const auto& p : {rsrs_profile(), default_profile()}) {
        const auto back = parse_profile(format_profile(p), p.name);
        CHECK(back == p);
    }
}

TEST_CASE("profile parse errors") {
    CHECK_THROWS_AS(parse_profile("v_max=fast\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_profile("warp=1\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_profile("friction_mu=1.5\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_profile("wall_height_blocks_sensing=true\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_profile("arena_width=0.5\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_profile("episode_steps=0\n", "x"), ConfigError);
    const auto p = parse_profile("sensor_range=unlimited\nfriction_mu=1\n", "x");
    CHECK(p.unlimited_sensing());
    CHECK(p.friction_mu == 1.0);
    CHECK(p.v_max == 0.09);  // untouched keys keep calibrated values
}

TEST_CASE("profile resolution: built-in, path, directory, environment") {
    testutil::TempDir dir("profiles");
    text::write_file(dir.file("slow.profile"), "v_max=0.05\n");
    CHECK(resolve_profile("default").name == "default");
    const auto by_path = resolve_profile(dir.file("slow.profile"));
    CHECK(by_path.name == "slow");
    CHECK(by_path.v_max == 0.05);
    CHECK(resolve_profile("slow", dir.path().string()).v_max == 0.05);
    ::setenv("SWARMDISC_PROFILE_DIR", dir.path().c_str(), 1);
    CHECK(resolve_profile("slow").v_max == 0.05);
    ::unsetenv("SWARMDISC_PROFILE_DIR");
    CHECK_THROWS_AS(resolve_profile("slow"), ConfigError);
}

TEST_CASE("rng streams are reproducible and within range") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng r(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform01();
        CHECK((u >= 0.0 && u < 1.0));
        CHECK(r.below(7) < 7);
    }
    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
    CHECK(mix_seed(1, 0) != mix_seed(2, 0));
    // Box-Muller moments over a long stream.
    Rng g(3);
    double sum = 0, sq = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = g.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
}
