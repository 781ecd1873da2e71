#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "swarm/embedding_client.hpp"
#include "swarm/error.hpp"
#include "swarm/evolution.hpp"
#include "swarm/kernels.hpp"
#include "swarm/kmedoids.hpp"
#include "swarm/novelty.hpp"

namespace swarm {

// Maps a batch of (genome, spawn seed) pairs to behaviour vectors. A failure
// on one genome is reported as GenomeFailure with its batch index.
class BehaviorBackend {
public:
    virtual ~BehaviorBackend() = default;
    virtual Backend kind() const noexcept = 0;
    virtual std::size_t dim() const noexcept = 0;
    virtual std::vector<BehaviorVector> evaluate(std::span<const ControllerGenome> genomes,
                                                 std::span<const std::uint64_t> seeds, const SimProfile& profile) = 0;
};

class GenomeFailure : public Error {
public:
    GenomeFailure(std::size_t index, const std::string& what) : Error(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class HandcraftedBackend final : public BehaviorBackend {
public:
    explicit HandcraftedBackend(kernels::ExecPolicy policy = kernels::ExecPolicy::parallel) : policy_(policy) {}
    Backend kind() const noexcept override { return Backend::handcrafted; }
    std::size_t dim() const noexcept override { return kHandcraftedDim; }
    std::vector<BehaviorVector> evaluate(std::span<const ControllerGenome> genomes,
                                         std::span<const std::uint64_t> seeds, const SimProfile& profile) override;

private:
    kernels::ExecPolicy policy_;
};

// Episodes are simulated and rendered in parallel; the stacks then go through
// the session one at a time.
class LearnedBackend final : public BehaviorBackend {
public:
    explicit LearnedBackend(EmbeddingSession& session, kernels::ExecPolicy policy = kernels::ExecPolicy::parallel)
        : session_(session), policy_(policy) {}
    Backend kind() const noexcept override { return Backend::learned; }
    std::size_t dim() const noexcept override { return session_.dim(); }
    std::vector<BehaviorVector> evaluate(std::span<const ControllerGenome> genomes,
                                         std::span<const std::uint64_t> seeds, const SimProfile& profile) override;

private:
    EmbeddingSession& session_;
    kernels::ExecPolicy policy_;
};

// fixed: every genome of the run is spawned from the same layout.
// per_genome: each evaluation draws its own layout.
enum class SeedPolicy { fixed, per_genome };
const char* to_string(SeedPolicy policy) noexcept;
// Throws ConfigError.
SeedPolicy parse_seed_policy(const std::string& name);

// Spawn seed of genome `index` in generation `generation`.
std::uint64_t episode_seed(SeedPolicy policy, std::uint64_t run_seed, int generation, std::size_t index) noexcept;

// A run aborted by its backend. archive() holds every generation completed
// before the failure.
class DiscoveryError : public Error {
public:
    DiscoveryError(int generation, std::size_t genome_index, const std::string& cause, NoveltyArchive partial);
    int generation() const noexcept { return generation_; }
    std::size_t genome_index() const noexcept { return genome_index_; }
    const NoveltyArchive& archive() const noexcept { return archive_; }

private:
    int generation_;
    std::size_t genome_index_;
    NoveltyArchive archive_;
};

using GenerationCallback = std::function<void(int generation, const NoveltyArchive& archive)>;

// Novelty search. Generation 0 is sampled uniformly from the genome box and
// scored against itself (leave-self-out); later generations are scored
// against the archive as of the previous generation boundary. Every evaluated
// genome is appended, so the result holds population * generations entries.
// Throws ConfigError for an invalid config, DiscoveryError on backend failure.
NoveltyArchive run_discovery(const SimProfile& profile, const SearchConfig& config, BehaviorBackend& backend,
                             SeedPolicy seed_policy = SeedPolicy::fixed, const GenerationCallback& on_generation = {},
                             kernels::ExecPolicy policy = kernels::ExecPolicy::parallel);

// k-medoids over an archive's behaviour vectors.
MedoidResult cluster_archive(const NoveltyArchive& archive, std::size_t k, std::uint64_t seed,
                             kernels::ExecPolicy policy = kernels::ExecPolicy::parallel);

}  // namespace swarm
