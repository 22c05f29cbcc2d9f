#include <map>

#include "doctest.h"

#include "advaudio/error.hpp"
#include "advaudio/genetic.hpp"

using namespace advaudio;

namespace {

RankedPopulation ranked_of(const std::vector<ObjectiveVector>& objs, bool nsga2) {
  std::vector<Individual> pop(objs.size());
  for (std::size_t i = 0; i < objs.size(); ++i) {
    pop[i].genome = {static_cast<float>(i)};
    pop[i].objectives = objs[i];
  }
  return nsga2 ? fast_nondominated_sort(std::move(pop))
               : dominance_count_rank(std::move(pop));
}

}  // namespace

TEST_SUITE("genetic") {

TEST_CASE("init with zero noise reproduces the original") {
  AudioClip original{{0.1f, -0.2f, 0.3f, 0.0f}, 16000};
  const auto pop = init_population(original, 5, 0.0, Rng(1));
  REQUIRE(pop.size() == 5);
  for (const Individual& ind : pop) {
    CHECK(ind.genome == original.samples);
    CHECK_FALSE(ind.objectives.has_value());
  }
}

TEST_CASE("init draws stay within the noise amplitude and differ per member") {
  AudioClip original;
  original.samples.assign(4000, 0.5f);
  const double amp = 0.01;
  const auto pop = init_population(original, 100, amp, Rng(99));
  REQUIRE(pop.size() == 100);
  for (const Individual& ind : pop) {
    REQUIRE(ind.genome.size() == original.samples.size());
    for (std::size_t g = 0; g < ind.genome.size(); ++g) {
      CHECK(ind.genome[g] >= original.samples[g] - static_cast<float>(amp) - 1e-7f);
      CHECK(ind.genome[g] <= original.samples[g] + static_cast<float>(amp) + 1e-7f);
    }
  }
  CHECK(pop[0].genome != pop[1].genome);
  // deterministic given the seed
  const auto again = init_population(original, 100, amp, Rng(99));
  for (std::size_t i = 0; i < pop.size(); ++i) CHECK(pop[i].genome == again[i].genome);
}

TEST_CASE("init clamps near full scale") {
  AudioClip original;
  original.samples.assign(100, 0.9995f);
  const auto pop = init_population(original, 10, 0.01, Rng(5));
  for (const Individual& ind : pop)
    for (float g : ind.genome) CHECK(g <= 1.0f);
}

TEST_CASE("same-rank selection pairs equal ranks and drops self-pairs") {
  // a=(1,3) b=(2,2) c=(3,1): l1=[a,b,c], l2=[c,b,a]
  const auto pairs = same_rank_selection(ranked_of({{1, 3}, {2, 2}, {3, 1}}, false));
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].parent_a == 0);
  CHECK(pairs[0].parent_b == 2);
  CHECK(pairs[1].parent_a == 2);
  CHECK(pairs[1].parent_b == 0);
}

TEST_CASE("same-rank selection on identical objectives yields nothing") {
  const auto pairs = same_rank_selection(ranked_of({{1, 1}, {1, 1}, {1, 1}}, false));
  CHECK(pairs.empty());
}

TEST_CASE("inverse-rank selection") {
  // anti-correlated front: both lists coincide, so everything self-pairs
  CHECK(inverse_rank_selection(ranked_of({{1, 3}, {2, 2}, {3, 1}}, false)).empty());

  // correlated chain: l1=[a,b,c], l2 worst-first by obj2=[c,b,a]
  const auto pairs = inverse_rank_selection(ranked_of({{1, 1}, {2, 2}, {3, 3}}, false));
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].parent_a == 0);
  CHECK(pairs[0].parent_b == 2);
  CHECK(pairs[1].parent_a == 2);
  CHECK(pairs[1].parent_b == 0);
}

TEST_CASE("selection pair counts and distinctness on random populations") {
  Rng rng(7);
  std::vector<ObjectiveVector> objs;
  for (int i = 0; i < 16; ++i)
    objs.push_back({rng.uniform(0, 4), rng.uniform(0, 4)});
  RankedPopulation moga = ranked_of(objs, false);
  for (const auto& pairs :
       {same_rank_selection(moga), inverse_rank_selection(moga)}) {
    CHECK(pairs.size() <= objs.size());
    for (const MatingPair& p : pairs) CHECK(p.parent_a != p.parent_b);
  }
  Rng r2(8);
  for (const MatingPair& p : roulette_selection(moga, 32, r2))
    CHECK(p.parent_a != p.parent_b);
}

TEST_CASE("roulette probabilities follow the fitness shares") {
  // fitness 1 and 3: expected selection frequencies 0.25 / 0.75
  Rng rng(20260810);
  const std::vector<double> fitness{1.0, 3.0};
  std::array<std::size_t, 2> counts{0, 0};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[roulette_draw(fitness, rng)];
  CHECK(std::abs(counts[0] / double(draws) - 0.25) <= 0.01);
  CHECK(std::abs(counts[1] / double(draws) - 0.75) <= 0.01);
}

TEST_CASE("roulette with equal fitness is uniform") {
  Rng rng(4);
  const std::vector<double> fitness(8, 0.125);
  std::vector<std::size_t> counts(8, 0);
  const int draws = 80000;
  for (int i = 0; i < draws; ++i) ++counts[roulette_draw(fitness, rng)];
  for (std::size_t c : counts) CHECK(std::abs(c / double(draws) - 0.125) <= 0.01);
}

TEST_CASE("roulette fitness derives from dominance counts") {
  RankedPopulation pop = ranked_of({{1, 1}, {2, 2}, {3, 3}}, false);
  const std::vector<double> f = roulette_fitness(pop);
  CHECK(f[0] == 1.0);
  CHECK(f[1] == 0.5);
  CHECK(f[2] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("roulette_draw input validation") {
  Rng rng(1);
  CHECK_THROWS_AS(roulette_draw({}, rng), Error);
  CHECK_THROWS_AS(roulette_draw({0.0, 0.0}, rng), Error);
  CHECK_THROWS_AS(roulette_draw({1.0, -1.0}, rng), Error);
}

TEST_CASE("tournament comparator prefers lower front then higher crowding") {
  // chain: front indices 0..3
  RankedPopulation pop = ranked_of({{1, 1}, {2, 2}, {3, 3}, {4, 4}}, true);
  REQUIRE(pop.front_index == std::vector<std::size_t>{0, 1, 2, 3});

  Rng rng(17);
  std::vector<std::size_t> wins(pop.size(), 0);
  const std::size_t pair_count = 25000;
  const auto pairs = nsga2_mating_selection(pop, pair_count, 2, rng);
  for (const MatingPair& p : pairs) {
    ++wins[p.parent_a];
    ++wins[p.parent_b];
  }
  // better-ranked members never win less often than the members they beat
  for (std::size_t i = 0; i + 1 < wins.size(); ++i) CHECK(wins[i] > wins[i + 1]);
  // the deterministic comparator itself: front 0 beats front 1 in a forced matchup
  CHECK(pairs.size() == pair_count);
}

TEST_CASE("tournament breaks front ties by crowding") {
  // single front; boundary members have infinite crowding
  RankedPopulation pop = ranked_of({{0, 3}, {1, 2.9}, {1.1, 2.8}, {3, 0}}, true);
  REQUIRE(pop.front_index == std::vector<std::size_t>(4, 0));
  Rng rng(23);
  std::vector<std::size_t> wins(pop.size(), 0);
  for (const MatingPair& p : nsga2_mating_selection(pop, 20000, 3, rng)) {
    ++wins[p.parent_a];
    ++wins[p.parent_b];
  }
  // infinite-crowding boundary members (0 and 3) out-win the interior ones
  CHECK(wins[0] > wins[1]);
  CHECK(wins[3] > wins[2]);
}

TEST_CASE("crossover blends exactly") {
  Individual p1, p2;
  p1.genome.assign(8, 0.0f);
  p2.genome.assign(8, 0.6f);
  const auto children = crossover(p1, p2);
  for (std::size_t g = 0; g < 8; ++g) {
    CHECK(children[0].genome[g] == 0.3f);
    CHECK(children[1].genome[g] == 0.2f);
    CHECK(children[2].genome[g] == 0.4f);
  }
  for (const Individual& c : children) CHECK_FALSE(c.objectives.has_value());
}

TEST_CASE("crossover of identical parents is a bit-exact fixed point") {
  Individual p;
  Rng rng(3);
  p.genome.resize(1000);
  for (auto& g : p.genome) g = static_cast<float>(rng.uniform(-1, 1));
  const auto children = crossover(p, p);
  for (const Individual& c : children) CHECK(c.genome == p.genome);
}

TEST_CASE("crossover children are convex combinations") {
  Rng rng(12);
  Individual p1, p2;
  p1.genome.resize(4096);
  p2.genome.resize(4096);
  for (auto& g : p1.genome) g = static_cast<float>(rng.uniform(-1, 1));
  for (auto& g : p2.genome) g = static_cast<float>(rng.uniform(-1, 1));
  const auto children = crossover(p1, p2);
  for (std::size_t g = 0; g < p1.genome.size(); ++g) {
    const float lo = std::min(p1.genome[g], p2.genome[g]);
    const float hi = std::max(p1.genome[g], p2.genome[g]);
    for (const Individual& c : children) {
      CHECK(c.genome[g] >= lo);
      CHECK(c.genome[g] <= hi);
    }
  }
}

TEST_CASE("crossover rejects mismatched genomes") {
  Individual p1, p2;
  p1.genome.assign(4, 0.0f);
  p2.genome.assign(5, 0.0f);
  CHECK_THROWS_AS(crossover(p1, p2), Error);
}

TEST_CASE("mutation identities") {
  Individual ind;
  ind.genome.assign(512, 0.25f);
  ind.objectives = ObjectiveVector{1, 2};
  ind.transcript = Transcript{"word"};

  Rng rng(9);
  Individual zero_prob = mutate(ind, {0.0, 0.5}, rng);
  CHECK(zero_prob.genome == ind.genome);
  CHECK_FALSE(zero_prob.objectives.has_value());  // caches invalidated regardless
  CHECK_FALSE(zero_prob.transcript.has_value());

  Individual zero_sigma = mutate(ind, {1.0, 0.0}, rng);
  CHECK(zero_sigma.genome == ind.genome);
}

TEST_CASE("mutated gene count matches the binomial expectation") {
  // 32,000 genes at prob 0.005: mean 160, sd 12.6 per trial
  const std::size_t genes = 32000;
  const MutationConfig cfg{0.005, 0.005};
  Rng master(20260810);
  double total_changed = 0.0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    Individual ind;
    ind.genome.assign(genes, 0.0f);
    Rng stream = master.split(static_cast<std::uint64_t>(t));
    Individual mutated = mutate(std::move(ind), cfg, stream);
    std::size_t changed = 0;
    for (float g : mutated.genome)
      if (g != 0.0f) ++changed;
    total_changed += static_cast<double>(changed);
  }
  const double mean = total_changed / trials;
  const double expected = genes * cfg.prob_m;
  const double sigma_of_mean =
      std::sqrt(genes * cfg.prob_m * (1.0 - cfg.prob_m) / trials);
  CHECK(std::abs(mean - expected) <= 3.0 * sigma_of_mean);
}

TEST_CASE("mutation keeps genes in range") {
  Individual ind;
  ind.genome.assign(2000, 0.999f);
  Rng rng(31);
  Individual mutated = mutate(std::move(ind), {1.0, 0.5}, rng);
  for (float g : mutated.genome) {
    CHECK(g <= 1.0f);
    CHECK(g >= -1.0f);
  }
}

TEST_CASE("config validation") {
  const MutationConfig bad_prob{-0.1, 0.1};
  CHECK_THROWS_AS(bad_prob.validate(), Error);
  const MutationConfig bad_sigma{0.5, -1.0};
  CHECK_THROWS_AS(bad_sigma.validate(), Error);
  SelectionConfig sel;
  sel.scheme_mix = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(sel.validate(), Error);
  sel = SelectionConfig{};
  sel.tournament_size = 1;
  CHECK_THROWS_AS(sel.validate(), Error);
}

}  // TEST_SUITE
