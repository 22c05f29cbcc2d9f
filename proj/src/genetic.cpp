#include "advaudio/genetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "advaudio/error.hpp"

namespace advaudio {
namespace {

constexpr int kSelfPairRetries = 32;

std::vector<std::size_t> order_by_objective(const RankedPopulation& pop, std::size_t obj,
                                            bool ascending) {
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = (*pop.members[a].objectives)[obj];
    const double vb = (*pop.members[b].objectives)[obj];
    return ascending ? va < vb : va > vb;
  });
  return order;
}

std::vector<MatingPair> pair_lists(const std::vector<std::size_t>& l1,
                                   const std::vector<std::size_t>& l2) {
  std::vector<MatingPair> pairs;
  for (std::size_t r = 0; r < l1.size(); ++r) {
    if (l1[r] == l2[r]) continue;
    pairs.push_back({l1[r], l2[r]});
  }
  return pairs;
}

}  // namespace

void SelectionConfig::validate() const {
  double sum = 0.0;
  for (double s : scheme_mix) {
    if (s < 0.0) throw Error("selection: scheme_mix entries must be non-negative");
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error("selection: scheme_mix must sum to 1");
  if (tournament_size < 2) throw Error("selection: tournament_size must be >= 2");
  if (elite_count < 0) throw Error("selection: elite_count must be >= 0");
}

void MutationConfig::validate() const {
  if (prob_m < 0.0 || prob_m > 1.0) throw Error("mutation: prob_m must be in [0, 1]");
  if (sigma < 0.0) throw Error("mutation: sigma must be >= 0");
}

std::vector<Individual> init_population(const AudioClip& original, std::size_t size,
                                        double noise_amplitude, const Rng& rng) {
  if (size == 0) throw Error("init_population: size must be positive");
  if (noise_amplitude < 0.0) throw Error("init_population: negative noise amplitude");

  std::vector<Individual> pop(size);
  for (std::size_t i = 0; i < size; ++i) {
    Rng stream = rng.split(i);
    Individual& ind = pop[i];
    ind.genome.resize(original.samples.size());
    for (std::size_t g = 0; g < original.samples.size(); ++g) {
      const double noise =
          noise_amplitude > 0.0 ? stream.uniform(-noise_amplitude, noise_amplitude) : 0.0;
      ind.genome[g] = clamp_amplitude(original.samples[g] + static_cast<float>(noise));
    }
  }
  return pop;
}

std::vector<MatingPair> same_rank_selection(const RankedPopulation& pop) {
  return pair_lists(order_by_objective(pop, 0, true), order_by_objective(pop, 1, true));
}

std::vector<MatingPair> inverse_rank_selection(const RankedPopulation& pop) {
  return pair_lists(order_by_objective(pop, 0, true), order_by_objective(pop, 1, false));
}

std::size_t roulette_draw(const std::vector<double>& fitness, Rng& rng) {
  if (fitness.empty()) throw Error("roulette_draw: empty fitness vector");
  double total = 0.0;
  for (double f : fitness) {
    if (f < 0.0) throw Error("roulette_draw: negative fitness");
    total += f;
  }
  if (total <= 0.0) throw Error("roulette_draw: all-zero fitness");
  double r = rng.uniform(0.0, total);
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    r -= fitness[i];
    if (r <= 0.0) return i;
  }
  return fitness.size() - 1;  // numerical tail
}

std::vector<double> roulette_fitness(const RankedPopulation& pop) {
  if (pop.dominance_count.size() != pop.size())
    throw Error("roulette_fitness: population lacks dominance counts");
  std::vector<double> fitness(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i)
    fitness[i] = 1.0 / (1.0 + static_cast<double>(pop.dominance_count[i]));
  return fitness;
}

std::vector<MatingPair> roulette_selection(const RankedPopulation& pop, std::size_t pair_count,
                                           Rng& rng) {
  const std::vector<double> fitness = roulette_fitness(pop);
  std::vector<MatingPair> pairs;
  pairs.reserve(pair_count);
  for (std::size_t p = 0; p < pair_count; ++p) {
    for (int attempt = 0; attempt < kSelfPairRetries; ++attempt) {
      const std::size_t a = roulette_draw(fitness, rng);
      const std::size_t b = roulette_draw(fitness, rng);
      if (a != b) {
        pairs.push_back({a, b});
        break;
      }
    }
  }
  return pairs;
}

std::vector<MatingPair> nsga2_mating_selection(const RankedPopulation& pop,
                                               std::size_t pair_count, int tournament_size,
                                               Rng& rng) {
  if (pop.front_index.size() != pop.size())
    throw Error("nsga2_mating_selection: population lacks front indices");
  if (tournament_size < 2) throw Error("nsga2_mating_selection: tournament_size must be >= 2");

  auto beats = [&](std::size_t a, std::size_t b) {
    if (pop.front_index[a] != pop.front_index[b]) return pop.front_index[a] < pop.front_index[b];
    if (pop.crowding[a] != pop.crowding[b]) return pop.crowding[a] > pop.crowding[b];
    return a < b;
  };
  auto tournament = [&]() {
    std::size_t winner = rng.index(pop.size());
    for (int i = 1; i < tournament_size; ++i) {
      const std::size_t challenger = rng.index(pop.size());
      if (beats(challenger, winner)) winner = challenger;
    }
    return winner;
  };

  std::vector<MatingPair> pairs;
  pairs.reserve(pair_count);
  for (std::size_t p = 0; p < pair_count; ++p) {
    for (int attempt = 0; attempt < kSelfPairRetries; ++attempt) {
      const std::size_t a = tournament();
      const std::size_t b = tournament();
      if (a != b) {
        pairs.push_back({a, b});
        break;
      }
    }
  }
  return pairs;
}

std::array<Individual, 3> crossover(const Individual& parent_a, const Individual& parent_b) {
  if (parent_a.genome.size() != parent_b.genome.size())
    throw Error("crossover: genome length mismatch");
  const std::size_t n = parent_a.genome.size();
  std::array<Individual, 3> children;
  for (Individual& c : children) c.genome.resize(n);
  for (std::size_t g = 0; g < n; ++g) {
    const float a = parent_a.genome[g];
    const float b = parent_b.genome[g];
    if (a == b) {
      // All three blends coincide; copying keeps the fixed point bit-exact.
      children[0].genome[g] = a;
      children[1].genome[g] = a;
      children[2].genome[g] = a;
      continue;
    }
    children[0].genome[g] = clamp_amplitude((a + b) / 2.0f);
    children[1].genome[g] = clamp_amplitude((2.0f * a + b) / 3.0f);
    children[2].genome[g] = clamp_amplitude((a + 2.0f * b) / 3.0f);
  }
  return children;
}

Individual mutate(Individual individual, const MutationConfig& cfg, Rng& rng) {
  cfg.validate();
  individual.invalidate();
  if (cfg.prob_m == 0.0 || cfg.sigma == 0.0) return individual;
  for (float& gene : individual.genome) {
    if (!rng.bernoulli(cfg.prob_m)) continue;
    gene = clamp_amplitude(gene + static_cast<float>(rng.gaussian(0.0, cfg.sigma)));
  }
  return individual;
}

}  // namespace advaudio
