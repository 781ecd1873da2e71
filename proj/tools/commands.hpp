#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "swarm/error.hpp"
#include "swarm/evaluation.hpp"
#include "swarm/profile.hpp"

namespace swarmdisc {

// Resolved parameters of each subcommand. They are stored verbatim in the run
// manifest, so a manifest alone is enough to rerun the command.
struct SimulateOptions {
    std::string profile = "rsrs";
    std::string genome;
    std::uint64_t seed = 0;
    bool frames = false;
    std::string out = ".";
};

struct ReplayOptions {
    std::string trajectory;
    int every = 10;
    int width = swarm::kFrameSize;
    int height = swarm::kFrameSize;
    std::string out = ".";
};

struct DatasetOptions {
    int n = 100;
    std::string profile = "rsrs";
    std::uint64_t seed = 0;
    int width = swarm::kFrameSize;
    int height = swarm::kFrameSize;
    std::string out = ".";
};

struct DiscoverOptions {
    std::string profile = "rsrs";
    std::string backend = "metrics";
    std::string endpoint;
    int timeout_ms = 30000;
    int pop = 50;
    int gens = 100;
    int k = 10;
    int neighbors = 15;
    double crossover = 0.7;
    double mutation = 0.15;
    int tournament = 3;
    double sigma = 0.1;
    std::uint64_t seed = 0;
    std::string seed_policy = "fixed";
    std::string calibration;
    bool export_embeddings = false;
    std::string out = ".";
};

struct ClusterOptions {
    std::string archive;
    int k = 10;
    std::uint64_t seed = 0;
    std::string profile = "rsrs";
    std::string calibration;
    std::string out = ".";
};

struct EvaluateOptions {
    std::string labeled;
    std::string archive;
    int synthetic = 0;
    std::string profile = "rsrs";
    std::string calibration;
    std::uint64_t seed = 0;
    std::uint64_t max_triplets = 1'000'000;
    bool export_embeddings = false;
    std::string out = ".";
};

struct AblateOptions {
    std::uint64_t seed = 0;
    int pop = 20;
    int gens = 25;
    int k = 6;
    std::string calibration;
    std::string out = ".";
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SimulateOptions, profile, genome, seed, frames, out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ReplayOptions, trajectory, every, width, height, out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DatasetOptions, n, profile, seed, width, height, out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DiscoverOptions, profile, backend, endpoint, timeout_ms, pop, gens, k,
                                                neighbors, crossover, mutation, tournament, sigma, seed, seed_policy,
                                                calibration, export_embeddings, out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ClusterOptions, archive, k, seed, profile, calibration, out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EvaluateOptions, labeled, archive, synthetic, profile, calibration, seed,
                                                max_triplets, export_embeddings, out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(AblateOptions, seed, pop, gens, k, calibration, out)

// Inputs a rerun takes from the manifest instead of re-resolving names and
// paths: the exact profile text and classifier calibration of the first run.
struct Pinned {
    std::optional<swarm::SimProfile> profile;
    std::optional<swarm::ClassifierThresholds> calibration;
};

// The ablation harness found the friction mechanism missing.
class MechanismError : public swarm::Error {
public:
    using Error::Error;
};

int run_simulate(const SimulateOptions& o, const Pinned& pinned = {});
int run_replay(const ReplayOptions& o);
int run_gen_dataset(const DatasetOptions& o, const Pinned& pinned = {});
int run_discover(const DiscoverOptions& o, const Pinned& pinned = {});
int run_cluster(const ClusterOptions& o, const Pinned& pinned = {});
int run_evaluate(const EvaluateOptions& o, const Pinned& pinned = {});
int run_ablate(const AblateOptions& o, const Pinned& pinned = {});

// Re-executes the command recorded in a manifest; `out`, when set, replaces
// the recorded output directory.
int run_from_manifest(const std::string& manifest_path, const std::string& out);

// Process exit codes by error class.
enum Exit : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitUsage = 2,      // bad flags, missing inputs, invalid configuration or arguments
    kExitIo = 3,
    kExitFormat = 4,     // malformed input file
    kExitEmbedding = 5,  // encoder endpoint failure
    kExitMechanism = 6,  // ablation mechanism check failed
};

}  // namespace swarmdisc
