#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "advaudio/audio_io.hpp"
#include "advaudio/features.hpp"
#include "advaudio/genetic.hpp"
#include "advaudio/moea.hpp"
#include "advaudio/oracle.hpp"
#include "advaudio/rng.hpp"
#include "advaudio/text_metrics.hpp"

namespace advaudio {

enum class AttackMode { untargeted, targeted };
enum class Algorithm { moga, nsga2 };

/// Everything a run needs. Defaults follow the reference configuration:
/// population 100, 30 survivors, 50 generations, per-gene mutation
/// probability 0.005.
struct AttackConfig {
  AttackMode mode = AttackMode::untargeted;
  Algorithm algorithm = Algorithm::nsga2;
  Transcript target_text;  // required (non-empty) iff mode == targeted
  std::size_t population_size = 100;
  std::size_t survivor_count = 30;
  std::size_t max_iters = 50;
  double init_noise_amplitude = 0.01;
  MutationConfig mutation;
  SelectionConfig selection;
  MfccConfig mfcc;
  std::uint64_t seed = 0;
  int parallelism = 1;

  void validate() const;
};

struct MemberRecord {
  ObjectiveVector objectives;
  bool rank0 = false;
};

/// Per-generation observability: the surviving population's objective
/// vectors, pareto membership, the ranked-best member, and the cumulative
/// count of distinct-genome oracle invocations.
struct GenerationRecord {
  std::size_t generation = 0;
  std::vector<MemberRecord> members;
  ObjectiveVector best_objectives;
  std::string best_transcript;
  std::size_t oracle_calls = 0;
};

struct AttackResult {
  Individual best;
  std::vector<GenerationRecord> history;
  Transcript original_transcript;
  bool converged = false;
  std::size_t generations = 0;
  std::size_t oracle_calls = 0;
};

/// Computes both objectives for candidates against one original clip.
/// Oracle responses are cached by genome content hash, so re-evaluating an
/// identical genome (crossover fixed points, elitism) never spends budget.
class FitnessEvaluator {
 public:
  FitnessEvaluator(const AudioClip& original, Transcript original_transcript,
                   const AttackConfig& cfg, const TranscriberBinding& binding);

  /// Convenience constructor that asks the oracle for the original's
  /// transcript itself.
  FitnessEvaluator(const AudioClip& original, const AttackConfig& cfg,
                   const TranscriberBinding& binding);

  /// Fills objectives and transcript; returns the objective vector.
  /// Objective 0 is the MFCC distance to the original; objective 1 is the
  /// word edit distance to the target (targeted) or the negated word edit
  /// distance to the original transcript (un-targeted).
  ObjectiveVector evaluate(Individual& individual);

  /// Evaluates every not-yet-evaluated individual, deduplicating identical
  /// genomes and running up to cfg.parallelism oracle calls concurrently.
  /// Results are assigned by index, never by completion order.
  void evaluate_all(std::span<Individual> individuals);

  const Transcript& original_transcript() const { return original_transcript_; }
  std::size_t oracle_calls() const { return oracle_calls_; }

 private:
  struct CacheEntry {
    Transcript transcript;
    double acoustic = 0.0;
  };

  CacheEntry measure(const std::vector<float>& genome) const;
  Transcript transcribe_with_retry(const AudioClip& clip) const;
  ObjectiveVector objectives_from(const CacheEntry& entry) const;

  const AttackConfig& cfg_;
  const TranscriberBinding& binding_;
  int sample_rate_;
  Transcript original_transcript_;
  MfccExtractor extractor_;
  MfccMatrix original_features_;
  std::unordered_map<std::uint64_t, CacheEntry> cache_;
  std::size_t oracle_calls_ = 0;
  mutable std::mutex mutex_;
};

/// One-shot form of FitnessEvaluator::evaluate.
ObjectiveVector evaluate_fitness(Individual& individual, const AudioClip& original,
                                 const Transcript& original_transcript, const AttackConfig& cfg,
                                 const TranscriberBinding& binding);

/// Runs the full evolutionary attack. Generation 0 is the evaluated
/// initial population; each later generation mates, mutates, evaluates and
/// truncates back to survivor_count. Terminates at max_iters or as soon as
/// the rank-0 genome set is identical across two successive evolved
/// generations. The returned best is a seeded uniform pick among the final
/// rank-0 members. `on_generation` (optional) observes each record as it
/// is produced, so an aborted run still leaves a usable partial history.
AttackResult run_attack(const AudioClip& original, const AttackConfig& cfg,
                        const TranscriberBinding& binding,
                        const std::function<void(const GenerationRecord&)>& on_generation = {});

/// Objective vectors of the rank-0 members, sorted by objective 0.
std::vector<ObjectiveVector> pareto_snapshot(const RankedPopulation& pop);

/// Content hash used for oracle-call accounting and convergence checks.
std::uint64_t genome_hash(const std::vector<float>& genome);

}  // namespace advaudio
