#include "swarm/evolution.hpp"

#include <algorithm>
#include <string>

#include "swarm/error.hpp"

namespace swarm {

void SearchConfig::validate(std::size_t archive_size) const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError("invalid search config: " + what);
    };
    require(population >= 2, "population must be >= 2");
    require(generations >= 1, "generations must be >= 1");
    require(k_neighbors >= 1, "k_neighbors must be >= 1");
    require(crossover_rate >= 0 && crossover_rate <= 1, "crossover_rate must lie in [0, 1]");
    require(mutation_rate >= 0 && mutation_rate <= 1, "mutation_rate must lie in [0, 1]");
    require(tournament_size >= 1, "tournament_size must be >= 1");
    require(mutation_sigma_fraction >= 0, "mutation_sigma_fraction must be >= 0");
    require(k_medoids >= 1, "k_medoids must be >= 1");
    const auto total = static_cast<std::size_t>(population) * static_cast<std::size_t>(generations);
    require(static_cast<std::size_t>(k_medoids) <= (archive_size ? archive_size : total),
            "k_medoids exceeds the archive size");
}

ControllerGenome sample_genome(const GenomeBounds& bounds, Rng& rng) {
    std::array<double, ControllerGenome::kGenes> genes{};
    for (std::size_t i = 0; i < genes.size(); ++i) {
        const double lim = bounds.limit(i);
        genes[i] = rng.uniform(-lim, lim);
    }
    return ControllerGenome::from_genes(genes);
}

std::size_t tournament_select(std::span<const double> scores, int size, Rng& rng) {
    std::size_t best = rng.below(scores.size());
    for (int i = 1; i < size; ++i) {
        const std::size_t challenger = rng.below(scores.size());
        if (scores[challenger] > scores[best]) best = challenger;
    }
    return best;
}

std::vector<ControllerGenome> evolve_generation(std::span<const ControllerGenome> population,
                                                std::span<const double> scores, const SearchConfig& config,
                                                const GenomeBounds& bounds, Rng& rng) {
    if (population.size() != scores.size() || population.empty()) {
        throw ValidationError("population and scores must be non-empty and of equal size");
    }
    std::vector<ControllerGenome> next;
    next.reserve(population.size());
    while (next.size() < population.size()) {
        const std::size_t a = tournament_select(scores, config.tournament_size, rng);
        const std::size_t b = tournament_select(scores, config.tournament_size, rng);
        auto child = population[a].genes();
        if (rng.bernoulli(config.crossover_rate)) {
            const auto tail = population[b].genes();
            const std::size_t cut = 1 + rng.below(ControllerGenome::kGenes - 1);
            std::copy(tail.begin() + static_cast<std::ptrdiff_t>(cut), tail.end(),
                      child.begin() + static_cast<std::ptrdiff_t>(cut));
        } else if (scores[b] > scores[a]) {
            child = population[b].genes();
        }
        for (std::size_t g = 0; g < child.size(); ++g) {
            if (!rng.bernoulli(config.mutation_rate)) continue;
            const double lim = bounds.limit(g);
            const double sigma = config.mutation_sigma_fraction * 2.0 * lim;
            child[g] = std::clamp(child[g] + sigma * rng.normal(), -lim, lim);
        }
        next.push_back(ControllerGenome::from_genes(child));
    }
    return next;
}

}  // namespace swarm
