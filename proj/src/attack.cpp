#include "advaudio/attack.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <thread>

#include "advaudio/error.hpp"

namespace advaudio {
namespace {

constexpr int kOracleAttempts = 3;
constexpr std::chrono::milliseconds kRetryBackoff{100};

// Named rng sub-streams so per-individual randomness is independent of
// evaluation order and scheduling.
constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamFinalPick = 2;
constexpr std::uint64_t kStreamGenerationBase = 16;

RankedPopulation rank_population(Algorithm algorithm, std::vector<Individual> pop) {
  return algorithm == Algorithm::nsga2 ? fast_nondominated_sort(std::move(pop))
                                       : dominance_count_rank(std::move(pop));
}

std::vector<std::size_t> survival_order(Algorithm algorithm, const RankedPopulation& pop) {
  return algorithm == Algorithm::nsga2 ? nsga2_order(pop) : dominance_count_order(pop);
}

/// MOGA mating pool: the three schemes contribute according to
/// scheme_mix, with roulette absorbing the rounding remainder.
std::vector<MatingPair> build_moga_pairs(const RankedPopulation& ranked, const AttackConfig& cfg,
                                         Rng& rng) {
  const std::size_t total = ranked.size();
  auto share = [total](double mix) {
    return static_cast<std::size_t>(std::lround(mix * static_cast<double>(total)));
  };
  const std::size_t quota_same = std::min(total, share(cfg.selection.scheme_mix[0]));
  const std::size_t quota_inverse =
      std::min(total - quota_same, share(cfg.selection.scheme_mix[1]));
  const std::size_t quota_roulette = total - quota_same - quota_inverse;

  std::vector<MatingPair> pairs;
  auto take = [&pairs](std::vector<MatingPair> src, std::size_t quota) {
    if (src.size() > quota) src.resize(quota);
    pairs.insert(pairs.end(), src.begin(), src.end());
  };
  take(same_rank_selection(ranked), quota_same);
  take(inverse_rank_selection(ranked), quota_inverse);
  take(roulette_selection(ranked, quota_roulette, rng), quota_roulette);
  return pairs;
}

std::vector<MatingPair> build_pairs(const RankedPopulation& ranked, const AttackConfig& cfg,
                                    Rng& rng) {
  if (cfg.algorithm == Algorithm::nsga2)
    return nsga2_mating_selection(ranked, ranked.size(), cfg.selection.tournament_size, rng);
  return build_moga_pairs(ranked, cfg, rng);
}

/// Sorted, deduplicated genomes of the rank-0 members; the convergence
/// rule compares these sets across successive generations.
std::vector<std::vector<float>> rank0_genome_set(const RankedPopulation& pop) {
  std::vector<std::vector<float>> set;
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (pop.is_rank0(i)) set.push_back(pop.members[i].genome);
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

GenerationRecord make_record(std::size_t generation, Algorithm algorithm,
                             const RankedPopulation& ranked, std::size_t oracle_calls) {
  GenerationRecord rec;
  rec.generation = generation;
  rec.oracle_calls = oracle_calls;
  rec.members.reserve(ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i)
    rec.members.push_back({*ranked.members[i].objectives, ranked.is_rank0(i)});
  const std::size_t best = survival_order(algorithm, ranked).front();
  rec.best_objectives = *ranked.members[best].objectives;
  rec.best_transcript = join(*ranked.members[best].transcript);
  return rec;
}

}  // namespace

std::uint64_t genome_hash(const std::vector<float>& genome) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ genome.size();
  for (float v : genome) {
    if (v == 0.0f) v = 0.0f;  // fold -0.0 so hashing agrees with value equality
    h = splitmix64(h ^ std::bit_cast<std::uint32_t>(v));
  }
  return h;
}

void AttackConfig::validate() const {
  if (population_size == 0) throw Error("attack: population_size must be positive");
  if (survivor_count == 0 || survivor_count > population_size)
    throw Error("attack: need 0 < survivor_count <= population_size");
  if (max_iters == 0) throw Error("attack: max_iters must be >= 1");
  if (static_cast<std::size_t>(selection.elite_count) > survivor_count)
    throw Error("attack: elite_count must not exceed survivor_count");
  if (init_noise_amplitude < 0.0) throw Error("attack: negative init_noise_amplitude");
  if (parallelism < 1) throw Error("attack: parallelism must be >= 1");
  if (mode == AttackMode::targeted && target_text.empty())
    throw Error("attack: targeted mode needs a non-empty target_text");
  if (mode == AttackMode::untargeted && !target_text.empty())
    throw Error("attack: target_text is only valid in targeted mode");
  mutation.validate();
  selection.validate();
  mfcc.validate();
}

FitnessEvaluator::FitnessEvaluator(const AudioClip& original, Transcript original_transcript,
                                   const AttackConfig& cfg, const TranscriberBinding& binding)
    : cfg_(cfg),
      binding_(binding),
      sample_rate_(original.sample_rate),
      original_transcript_(std::move(original_transcript)),
      extractor_(cfg.mfcc),
      original_features_(extractor_.compute(original)) {}

FitnessEvaluator::FitnessEvaluator(const AudioClip& original, const AttackConfig& cfg,
                                   const TranscriberBinding& binding)
    : cfg_(cfg),
      binding_(binding),
      sample_rate_(original.sample_rate),
      extractor_(cfg.mfcc),
      original_features_(extractor_.compute(original)) {
  // The original goes through the same cache so an identity candidate is
  // free later.
  CacheEntry entry = measure(original.samples);
  original_transcript_ = entry.transcript;
  cache_.emplace(genome_hash(original.samples), std::move(entry));
  oracle_calls_ = 1;
}

Transcript FitnessEvaluator::transcribe_with_retry(const AudioClip& clip) const {
  for (int attempt = 1;; ++attempt) {
    try {
      return transcribe(clip, binding_);
    } catch (const std::exception& e) {
      if (attempt >= kOracleAttempts)
        throw OracleError("oracle failed after " + std::to_string(kOracleAttempts) +
                          " attempts: " + e.what());
      std::this_thread::sleep_for(kRetryBackoff * attempt);
    }
  }
}

FitnessEvaluator::CacheEntry FitnessEvaluator::measure(const std::vector<float>& genome) const {
  AudioClip clip{genome, sample_rate_};
  CacheEntry entry;
  entry.acoustic = mfcc_distance(original_features_, extractor_.compute(clip));
  entry.transcript = transcribe_with_retry(clip);
  return entry;
}

ObjectiveVector FitnessEvaluator::objectives_from(const CacheEntry& entry) const {
  double text_objective;
  if (cfg_.mode == AttackMode::targeted)
    text_objective = static_cast<double>(word_edit_distance(cfg_.target_text, entry.transcript));
  else
    text_objective =
        -static_cast<double>(word_edit_distance(original_transcript_, entry.transcript));
  return {entry.acoustic, text_objective};
}

ObjectiveVector FitnessEvaluator::evaluate(Individual& individual) {
  const std::uint64_t key = genome_hash(individual.genome);
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      individual.transcript = it->second.transcript;
      individual.objectives = objectives_from(it->second);
      return *individual.objectives;
    }
  }
  CacheEntry entry = measure(individual.genome);
  {
    std::lock_guard lock(mutex_);
    auto [it, inserted] = cache_.emplace(key, std::move(entry));
    if (inserted) ++oracle_calls_;
    individual.transcript = it->second.transcript;
    individual.objectives = objectives_from(it->second);
    return *individual.objectives;
  }
}

void FitnessEvaluator::evaluate_all(std::span<Individual> individuals) {
  // Deduplicate by content so identical genomes cost one oracle call no
  // matter how many copies the operators produced.
  std::vector<std::uint64_t> keys(individuals.size());
  std::vector<std::size_t> unique;  // index of first individual per new key
  {
    std::lock_guard lock(mutex_);
    std::unordered_map<std::uint64_t, std::size_t> first_seen;
    for (std::size_t i = 0; i < individuals.size(); ++i) {
      if (individuals[i].objectives) continue;
      keys[i] = genome_hash(individuals[i].genome);
      if (cache_.contains(keys[i])) continue;
      if (first_seen.emplace(keys[i], i).second) unique.push_back(i);
    }
  }

  const int workers =
      std::min<int>(cfg_.parallelism, static_cast<int>(unique.size() ? unique.size() : 1));
  std::vector<CacheEntry> results(unique.size());
  std::vector<std::exception_ptr> errors(unique.size());

  auto work = [&](std::atomic<std::size_t>& next) {
    for (std::size_t slot = next.fetch_add(1); slot < unique.size();
         slot = next.fetch_add(1)) {
      try {
        results[slot] = measure(individuals[unique[slot]].genome);
      } catch (...) {
        errors[slot] = std::current_exception();
      }
    }
  };

  std::atomic<std::size_t> next{0};
  if (workers <= 1) {
    work(next);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back([&] { work(next); });
    for (auto& t : pool) t.join();
  }

  for (std::size_t slot = 0; slot < unique.size(); ++slot) {
    if (!errors[slot]) continue;
    try {
      std::rethrow_exception(errors[slot]);
    } catch (const std::exception& e) {
      throw OracleError("evaluating individual " + std::to_string(unique[slot]) + ": " +
                        e.what());
    }
  }

  {
    std::lock_guard lock(mutex_);
    for (std::size_t slot = 0; slot < unique.size(); ++slot) {
      if (cache_.emplace(keys[unique[slot]], std::move(results[slot])).second) ++oracle_calls_;
    }
    for (std::size_t i = 0; i < individuals.size(); ++i) {
      if (individuals[i].objectives) continue;
      const CacheEntry& entry = cache_.at(keys[i]);
      individuals[i].transcript = entry.transcript;
      individuals[i].objectives = objectives_from(entry);
    }
  }
}

ObjectiveVector evaluate_fitness(Individual& individual, const AudioClip& original,
                                 const Transcript& original_transcript, const AttackConfig& cfg,
                                 const TranscriberBinding& binding) {
  FitnessEvaluator evaluator(original, original_transcript, cfg, binding);
  return evaluator.evaluate(individual);
}

std::vector<ObjectiveVector> pareto_snapshot(const RankedPopulation& pop) {
  std::vector<ObjectiveVector> snapshot;
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (pop.is_rank0(i)) snapshot.push_back(*pop.members[i].objectives);
  std::stable_sort(snapshot.begin(), snapshot.end(),
                   [](const ObjectiveVector& a, const ObjectiveVector& b) { return a[0] < b[0]; });
  return snapshot;
}

AttackResult run_attack(const AudioClip& original, const AttackConfig& cfg,
                        const TranscriberBinding& binding,
                        const std::function<void(const GenerationRecord&)>& on_generation) {
  cfg.validate();
  binding.validate();
  if (original.samples.empty()) throw Error("attack: empty original clip");

  AttackResult result;
  FitnessEvaluator evaluator(original, cfg, binding);
  result.original_transcript = evaluator.original_transcript();

  Rng master(cfg.seed);
  std::vector<Individual> pop = init_population(original, cfg.population_size,
                                                cfg.init_noise_amplitude,
                                                master.split(kStreamInit));
  evaluator.evaluate_all(pop);
  RankedPopulation ranked = rank_population(cfg.algorithm, std::move(pop));

  auto emit = [&](std::size_t generation) {
    result.history.push_back(
        make_record(generation, cfg.algorithm, ranked, evaluator.oracle_calls()));
    if (on_generation) on_generation(result.history.back());
  };
  emit(0);

  std::vector<std::vector<float>> previous_front;
  bool have_previous = false;

  for (std::size_t g = 1; g <= cfg.max_iters; ++g) {
    Rng selection_rng = master.split(kStreamGenerationBase + 2 * g);
    Rng mutation_rng = master.split(kStreamGenerationBase + 2 * g + 1);

    const std::vector<MatingPair> pairs = build_pairs(ranked, cfg, selection_rng);

    std::vector<Individual> children;
    children.reserve(pairs.size() * 3);
    for (const MatingPair& pair : pairs) {
      auto triple = crossover(ranked.members[pair.parent_a], ranked.members[pair.parent_b]);
      for (Individual& child : triple) children.push_back(std::move(child));
    }
    for (std::size_t c = 0; c < children.size(); ++c) {
      Rng stream = mutation_rng.split(c);
      children[c] = mutate(std::move(children[c]), cfg.mutation, stream);
    }
    evaluator.evaluate_all(children);

    std::vector<Individual> pool = std::move(ranked.members);
    pool.insert(pool.end(), std::make_move_iterator(children.begin()),
                std::make_move_iterator(children.end()));
    RankedPopulation pooled = rank_population(cfg.algorithm, std::move(pool));
    const std::vector<std::size_t> order = survival_order(cfg.algorithm, pooled);

    std::vector<Individual> survivors;
    const std::size_t keep = std::min(cfg.survivor_count, pooled.size());
    survivors.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i)
      survivors.push_back(std::move(pooled.members[order[i]]));
    ranked = rank_population(cfg.algorithm, std::move(survivors));

    emit(g);

    std::vector<std::vector<float>> front = rank0_genome_set(ranked);
    if (have_previous && front == previous_front) {
      result.converged = true;
      break;
    }
    previous_front = std::move(front);
    have_previous = true;
  }

  std::vector<std::size_t> final_front;
  for (std::size_t i = 0; i < ranked.size(); ++i)
    if (ranked.is_rank0(i)) final_front.push_back(i);
  Rng pick_rng = master.split(kStreamFinalPick);
  result.best = ranked.members[final_front[pick_rng.index(final_front.size())]];
  result.generations = result.history.back().generation;
  result.oracle_calls = evaluator.oracle_calls();
  return result;
}

}  // namespace advaudio
