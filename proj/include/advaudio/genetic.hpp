#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "advaudio/audio_io.hpp"
#include "advaudio/moea.hpp"
#include "advaudio/rng.hpp"

namespace advaudio {

/// An ordered parent pair, stored as indices into the current population.
/// The two indices always differ; self-pairs are discarded at selection.
struct MatingPair {
  std::size_t parent_a = 0;
  std::size_t parent_b = 0;
};

/// How the mating pool is assembled. scheme_mix gives the share of pairs
/// drawn by same-rank / inverse-rank / roulette selection (dominance-count
/// algorithm); tournament_size drives NSGA-II mating; elite_count is the
/// number of members guaranteed to survive unchanged.
struct SelectionConfig {
  std::array<double, 3> scheme_mix = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  int tournament_size = 2;
  int elite_count = 1;

  void validate() const;
};

struct MutationConfig {
  double prob_m = 0.005;
  double sigma = 0.005;

  void validate() const;
};

/// Seeds the population by adding element-wise uniform noise in
/// [-noise_amplitude, +noise_amplitude] to the original waveform, clamped
/// back to [-1, 1]. Each individual draws from its own rng sub-stream.
std::vector<Individual> init_population(const AudioClip& original, std::size_t size,
                                        double noise_amplitude, const Rng& rng);

/// Pairs the r-th best member by objective 1 with the r-th best by
/// objective 2 (both ascending, stable). Self-pairs are dropped.
std::vector<MatingPair> same_rank_selection(const RankedPopulation& pop);

/// Same, but the second list is ranked worst-first by objective 2.
std::vector<MatingPair> inverse_rank_selection(const RankedPopulation& pop);

/// One fitness-proportional draw: p_i = fitness_i / sum(fitness).
std::size_t roulette_draw(const std::vector<double>& fitness, Rng& rng);

/// Scalar fitness for the roulette wheel, 1 / (1 + dominance_count).
std::vector<double> roulette_fitness(const RankedPopulation& pop);

/// Draws pair_count pairs with both parents sampled independently by
/// roulette wheel; a self-pair is redrawn a bounded number of times and
/// then skipped.
std::vector<MatingPair> roulette_selection(const RankedPopulation& pop, std::size_t pair_count,
                                           Rng& rng);

/// Each parent wins a uniform random tournament decided by front index,
/// then crowding distance, then input position.
std::vector<MatingPair> nsga2_mating_selection(const RankedPopulation& pop,
                                               std::size_t pair_count, int tournament_size,
                                               Rng& rng);

/// Arithmetic three-child recombination: the even blend and the two blends
/// dominated by one parent, all clamped to the valid amplitude range.
/// Genes where the parents agree are copied through bit-exactly.
std::array<Individual, 3> crossover(const Individual& parent_a, const Individual& parent_b);

/// Per-gene Gaussian mutation: with probability prob_m adds N(0, sigma),
/// clamped. Clears the individual's evaluation caches.
Individual mutate(Individual individual, const MutationConfig& cfg, Rng& rng);

}  // namespace advaudio
