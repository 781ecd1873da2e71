#include <doctest.h>

#include <cmath>

#include "stub_server.hpp"
#include "swarm/discovery.hpp"
#include "swarm/embedding_client.hpp"
#include "swarm/error.hpp"
#include "swarm/rng.hpp"

using namespace swarm;
using namespace std::chrono_literals;

namespace {

EmbeddingEndpoint stub_endpoint(const std::string& flags = "") {
    return EmbeddingEndpoint::parse(std::string("exec:") + EMBED_STUB_BIN + " " + flags);
}

std::vector<std::uint8_t> random_stack(Rng& rng, const StackShape& shape) {
    std::vector<std::uint8_t> s(shape.bytes());
    for (auto& b : s) b = static_cast<std::uint8_t>(rng.below(256));
    return s;
}

// Pooled chunk means, computed independently of the stub.
std::vector<float> pooled(const std::vector<std::uint8_t>& s, std::size_t dim) {
    std::vector<float> out;
    const std::size_t chunk = s.size() / dim;
    for (std::size_t j = 0; j < dim; ++j) {
        double sum = 0;
        for (std::size_t b = 0; b < chunk; ++b) sum += s[j * chunk + b];
        out.push_back(static_cast<float>(sum / (255.0 * static_cast<double>(chunk))));
    }
    return out;
}

}  // namespace

TEST_CASE("endpoint parsing") {
    const auto tcp = EmbeddingEndpoint::parse("tcp://127.0.0.1:9000");
    CHECK(tcp.transport == EmbeddingEndpoint::Transport::tcp);
    CHECK(tcp.host == "127.0.0.1");
    CHECK(tcp.port == 9000);
    const auto exec = EmbeddingEndpoint::parse("exec:python3 -m encoder");
    CHECK(exec.transport == EmbeddingEndpoint::Transport::subprocess);
    CHECK(exec.command == "python3 -m encoder");
    CHECK(EmbeddingEndpoint::parse("./encoder --serve").command == "./encoder --serve");
    CHECK(tcp.describe().find("9000") != std::string::npos);
    CHECK_THROWS_AS(EmbeddingEndpoint::parse(""), ConfigError);
    CHECK_THROWS_AS(EmbeddingEndpoint::parse("exec:"), ConfigError);
    CHECK_THROWS_AS(EmbeddingEndpoint::parse("tcp://host"), ConfigError);
    CHECK_THROWS_AS(EmbeddingEndpoint::parse("tcp://host:99999"), ConfigError);
    CHECK_THROWS_AS(EmbeddingEndpoint::parse("tcp://:80"), ConfigError);
}

TEST_CASE("subprocess session: handshake, ids, values, determinism") {
    EmbeddingSession session(stub_endpoint(), StackShape{});
    CHECK(session.dim() == 512);
    CHECK(session.server_version() == 1);
    Rng rng(1);
    std::vector<std::uint8_t> first;
    // Seven requests: ids 1..7 all echo correctly or the session would throw.
    for (int i = 0; i < 7; ++i) {
        const auto stack = random_stack(rng, session.shape());
        if (i == 0) first = stack;
        const auto v = session.embed_bytes(stack);
        REQUIRE(v.size() == 512);
        for (const float x : v) CHECK(std::isfinite(x));
        CHECK(v == pooled(stack, 512));
    }
    CHECK(session.embed_bytes(first) == session.embed_bytes(first));
    session.close();
    CHECK_FALSE(session.is_open());
    CHECK_THROWS_AS(session.embed_bytes(first), TransportError);
}

TEST_CASE("tcp session") {
    stub::Options o;
    o.dim = 64;
    const int port = stub::serve_tcp_once(o);
    EmbeddingSession session(EmbeddingEndpoint::parse("tcp://127.0.0.1:" + std::to_string(port)), StackShape{});
    CHECK(session.dim() == 64);
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
        const auto stack = random_stack(rng, session.shape());
        CHECK(session.embed_bytes(stack) == pooled(stack, 64));
    }
}

TEST_CASE("frame stacks are checked locally before sending") {
    EmbeddingSession session(stub_endpoint("--dim 16"), StackShape{});
    const auto p = rsrs_profile();
    const auto traj = run_episode({0.05, 0.3, 0.05, -0.3}, p, 1);
    const auto good = subsample(traj);
    const auto v = learned_embed(good, session);
    CHECK(v.backend == Backend::learned);
    CHECK(v.dim() == 16);
    const auto tall = subsample(traj, 64, 65);
    CHECK_THROWS_AS(learned_embed(tall, session), ValidationError);
    const std::vector<std::uint8_t> short_stack(100);
    CHECK_THROWS_AS(session.embed_bytes(short_stack), ValidationError);
    // Nothing was sent, so the session is still usable.
    CHECK(learned_embed(good, session) == v);
}

TEST_CASE("handshake failures") {
    CHECK_THROWS_AS(EmbeddingSession(stub_endpoint("--fault bad-magic"), StackShape{}), HandshakeError);
    CHECK_THROWS_AS(EmbeddingSession(stub_endpoint("--fault bad-version"), StackShape{}), HandshakeError);
    CHECK_THROWS_AS(EmbeddingSession(stub_endpoint("--dim 0"), StackShape{}), HandshakeError);
    CHECK_THROWS_AS(EmbeddingSession(EmbeddingEndpoint::parse("exec:true"), StackShape{}), TransportError);
    CHECK_THROWS_AS(EmbeddingSession(EmbeddingEndpoint::parse("tcp://127.0.0.1:1"), StackShape{}), TransportError);
}

TEST_CASE("request-level faults close the session") {
    Rng rng(3);
    const StackShape shape;
    const auto stack = random_stack(rng, shape);
    struct Case {
        const char* flags;
        int kind;
    };
    for (const Case c : {Case{"--fault bad-id --fault-at 2", 0}, Case{"--fault nan --fault-at 1", 1},
                         Case{"--fault close --fault-at 0", 2}, Case{"--fault hang --fault-at 1", 3}}) {
        CAPTURE(c.flags);
        EmbeddingSession session(stub_endpoint(c.flags), shape, 500ms);
        int ok = 0;
        try {
            for (int i = 0; i < 5; ++i) {
                session.embed_bytes(stack);
                ++ok;
            }
            FAIL("expected a failure");
        } catch (const ResponseIdError&) {
            CHECK(c.kind == 0);
            CHECK(ok == 2);
        } catch (const TimeoutError&) {
            CHECK(c.kind == 3);
            CHECK(ok == 1);
        } catch (const TransportError&) {
            CHECK(c.kind == 2);
            CHECK(ok == 0);
        } catch (const EmbeddingError&) {
            CHECK(c.kind == 1);
            CHECK(ok == 1);
        }
        CHECK_FALSE(session.is_open());
    }
}

TEST_CASE("learned backend drives discovery") {
    EmbeddingSession session(stub_endpoint("--dim 32"), StackShape{});
    LearnedBackend backend(session);
    CHECK(backend.kind() == Backend::learned);
    CHECK(backend.dim() == 32);
    SearchConfig cfg;
    cfg.population = 6;
    cfg.generations = 3;
    cfg.k_medoids = 3;
    cfg.seed = 4;
    const auto p = rsrs_profile();
    const auto archive = run_discovery(p, cfg, backend);
    CHECK(archive.size() == 18);
    CHECK(archive.backend() == Backend::learned);
    CHECK(archive.dim() == 32);
    // Vector-exact rerun within the same session.
    const auto again = run_discovery(p, cfg, backend);
    CHECK(again == archive);
    const auto e = archive.entry(5);
    const auto stack = subsample(run_episode(e.genome, p, e.seed));
    const auto direct = session.embed_bytes(stack.bytes());
    for (std::size_t j = 0; j < 32; ++j) CHECK(archive.vector(5)[j] == static_cast<double>(direct[j]));
    CHECK(cluster_archive(archive, 3, 1).medoids.size() == 3);
}

TEST_CASE("a dying encoder aborts discovery with a partial archive") {
    EmbeddingSession session(stub_endpoint("--dim 8 --fault close --fault-at 9"), StackShape{});
    LearnedBackend backend(session);
    SearchConfig cfg;
    cfg.population = 4;
    cfg.generations = 5;
    cfg.k_medoids = 2;
    try {
        run_discovery(rsrs_profile(), cfg, backend);
        FAIL("expected DiscoveryError");
    } catch (const DiscoveryError& e) {
        CHECK(e.generation() == 2);
        CHECK(e.genome_index() == 1);
        CHECK(e.archive().size() == 8);
    }
}
