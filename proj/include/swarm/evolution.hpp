#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swarm/rng.hpp"
#include "swarm/sim.hpp"

namespace swarm {

struct SearchConfig {
    int population = 50;
    int generations = 100;
    int k_neighbors = 15;
    double crossover_rate = 0.7;
    double mutation_rate = 0.15;
    int tournament_size = 3;
    double mutation_sigma_fraction = 0.1;  // of each gene's full range
    std::uint64_t seed = 0;
    int k_medoids = 10;

    // Throws ConfigError. `archive_size`, when non-zero, also bounds k_medoids.
    void validate(std::size_t archive_size = 0) const;
};

// Uniform over the controller box.
ControllerGenome sample_genome(const GenomeBounds& bounds, Rng& rng);

// Index of the winner of a tournament of `size` draws with replacement;
// highest score wins, ties go to the earlier draw.
std::size_t tournament_select(std::span<const double> scores, int size, Rng& rng);

// One generation of the tournament GA. For each offspring: two tournaments
// pick parents; with probability crossover_rate a single-point crossover
// (cut after gene 1, 2 or 3) takes the head of the first parent and the tail
// of the second, otherwise the fitter parent is cloned; then every gene is
// perturbed with probability mutation_rate by N(0, sigma^2), sigma =
// mutation_sigma_fraction * 2 * limit, and clamped to the bounds.
// Throws ValidationError if population and scores differ in size.
std::vector<ControllerGenome> evolve_generation(std::span<const ControllerGenome> population,
                                                std::span<const double> scores, const SearchConfig& config,
                                                const GenomeBounds& bounds, Rng& rng);

}  // namespace swarm
