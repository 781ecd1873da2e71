#include "swarm/discovery.hpp"

#include <exception>

namespace swarm {

std::vector<BehaviorVector> HandcraftedBackend::evaluate(std::span<const ControllerGenome> genomes,
                                                         std::span<const std::uint64_t> seeds,
                                                         const SimProfile& profile) {
    for (std::size_t i = 0; i < genomes.size(); ++i) {
        try {
            validate_genome(genomes[i], profile);
        } catch (const Error& e) {
            throw GenomeFailure(i, e.what());
        }
    }
    const auto metrics = kernels::handcrafted_batch(genomes, seeds, profile, policy_);
    std::vector<BehaviorVector> out;
    out.reserve(metrics.size());
    for (const auto& m : metrics) out.push_back(m.to_vector());
    return out;
}

std::vector<BehaviorVector> LearnedBackend::evaluate(std::span<const ControllerGenome> genomes,
                                                     std::span<const std::uint64_t> seeds, const SimProfile& profile) {
    for (std::size_t i = 0; i < genomes.size(); ++i) {
        try {
            validate_genome(genomes[i], profile);
        } catch (const Error& e) {
            throw GenomeFailure(i, e.what());
        }
    }
    const auto& shape = session_.shape();
    const auto stacks = kernels::render_stacks(genomes, seeds, profile, shape.width, shape.height, policy_);
    std::vector<BehaviorVector> out;
    out.reserve(stacks.size());
    for (std::size_t i = 0; i < stacks.size(); ++i) {
        try {
            out.push_back(learned_embed(stacks[i], session_));
        } catch (const Error& e) {
            throw GenomeFailure(i, e.what());
        }
    }
    return out;
}

const char* to_string(SeedPolicy policy) noexcept {
    return policy == SeedPolicy::fixed ? "fixed" : "per-genome";
}

SeedPolicy parse_seed_policy(const std::string& name) {
    if (name == "fixed") return SeedPolicy::fixed;
    if (name == "per-genome") return SeedPolicy::per_genome;
    throw ConfigError("unknown seed policy '" + name + "' (expected fixed or per-genome)");
}

std::uint64_t episode_seed(SeedPolicy policy, std::uint64_t run_seed, int generation, std::size_t index) noexcept {
    const std::uint64_t stream = mix_seed(run_seed, 2);
    if (policy == SeedPolicy::fixed) return stream;
    return mix_seed(stream, (static_cast<std::uint64_t>(generation) << 32) + index);
}

DiscoveryError::DiscoveryError(int generation, std::size_t genome_index, const std::string& cause,
                               NoveltyArchive partial)
    : Error("discovery aborted at generation " + std::to_string(generation) + ", genome " +
            std::to_string(genome_index) + ": " + cause),
      generation_(generation), genome_index_(genome_index), archive_(std::move(partial)) {}

NoveltyArchive run_discovery(const SimProfile& profile, const SearchConfig& config, BehaviorBackend& backend,
                             SeedPolicy seed_policy, const GenerationCallback& on_generation,
                             kernels::ExecPolicy policy) {
    validate(profile);
    config.validate();
    const auto bounds = GenomeBounds::from(profile);
    const auto pop_size = static_cast<std::size_t>(config.population);
    const auto k = static_cast<std::size_t>(config.k_neighbors);

    Rng rng(mix_seed(config.seed, 1));
    std::vector<ControllerGenome> population;
    population.reserve(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i) population.push_back(sample_genome(bounds, rng));

    NoveltyArchive archive(backend.kind(), backend.dim());
    std::vector<std::uint64_t> seeds(pop_size);
    std::vector<double> values(pop_size * backend.dim());
    for (int gen = 0; gen < config.generations; ++gen) {
        for (std::size_t i = 0; i < pop_size; ++i) seeds[i] = episode_seed(seed_policy, config.seed, gen, i);

        std::vector<BehaviorVector> behaviors;
        try {
            behaviors = backend.evaluate(population, seeds, profile);
            for (std::size_t i = 0; i < behaviors.size(); ++i) {
                if (behaviors[i].backend != archive.backend() || behaviors[i].dim() != archive.dim()) {
                    throw GenomeFailure(i, "backend returned a vector of dimension " +
                                               std::to_string(behaviors[i].dim()) + ", expected " +
                                               std::to_string(archive.dim()));
                }
            }
        } catch (const GenomeFailure& e) {
            throw DiscoveryError(gen, e.index(), e.what(), archive);
        } catch (const std::exception& e) {
            throw DiscoveryError(gen, 0, e.what(), archive);
        }

        for (std::size_t i = 0; i < pop_size; ++i) {
            std::copy(behaviors[i].values.begin(), behaviors[i].values.end(),
                      values.begin() + static_cast<std::ptrdiff_t>(i * archive.dim()));
        }
        const PointSet cohort{values, archive.dim()};
        const auto scores = gen == 0 ? kernels::cohort_novelty(cohort, k, policy)
                                     : kernels::novelty_scores(cohort, archive.points(), k, policy);

        for (std::size_t i = 0; i < pop_size; ++i) {
            archive.add({population[i], seeds[i], static_cast<std::uint32_t>(gen), scores[i]}, behaviors[i]);
        }
        if (on_generation) on_generation(gen, archive);
        if (gen + 1 < config.generations) population = evolve_generation(population, scores, config, bounds, rng);
    }
    return archive;
}

MedoidResult cluster_archive(const NoveltyArchive& archive, std::size_t k, std::uint64_t seed,
                             kernels::ExecPolicy policy) {
    return k_medoids(archive.points(), k, seed, policy);
}

}  // namespace swarm
