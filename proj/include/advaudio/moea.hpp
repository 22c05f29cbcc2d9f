#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "advaudio/text_metrics.hpp"

namespace advaudio {

/// Objective values, all in minimization orientation. The un-targeted
/// text objective is stored negated so one dominance definition covers
/// both attack modes.
using ObjectiveVector = std::vector<double>;

/// One candidate solution: a waveform genome plus the caches filled in
/// at evaluation time.
struct Individual {
  std::vector<float> genome;
  std::optional<ObjectiveVector> objectives;
  std::optional<Transcript> transcript;

  void invalidate() {
    objectives.reset();
    transcript.reset();
  }
};

/// Population annotated by one of the two ranking schemes. NSGA-II fills
/// front_index and crowding; the dominance-count scheme fills
/// dominance_count. Exactly one family of fields is populated.
struct RankedPopulation {
  std::vector<Individual> members;
  std::vector<std::size_t> front_index;
  std::vector<double> crowding;
  std::vector<std::size_t> dominance_count;

  std::size_t size() const { return members.size(); }

  /// Rank-0 = non-dominated under whichever ranking was computed.
  bool is_rank0(std::size_t i) const {
    return front_index.empty() ? dominance_count[i] == 0 : front_index[i] == 0;
  }
};

/// True iff a is no worse than b everywhere and strictly better somewhere
/// (minimization). Equal vectors never dominate each other.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

/// Deb's fast non-dominated sort plus per-front crowding distances.
/// Front 0 holds the non-dominated members; front k+1 the members
/// non-dominated once fronts 0..k are removed.
RankedPopulation fast_nondominated_sort(std::vector<Individual> pop);

/// Fonseca/Fleming-style ranking: each member's score is the number of
/// other members that dominate it. Zero means pareto-optimal.
RankedPopulation dominance_count_rank(std::vector<Individual> pop);

/// Crowding distance of a single mutually non-dominating front.
/// Boundary members per objective get +infinity; interior members
/// accumulate (next - prev) / (max - min); a degenerate objective
/// (max == min) contributes nothing.
std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front);

/// Index order for NSGA-II survival / tournaments: front ascending,
/// crowding descending, input position as the final tie-break.
std::vector<std::size_t> nsga2_order(const RankedPopulation& pop);

/// Index order for dominance-count survival: count ascending, then the
/// first objective ascending (prefer acoustically closer), then input
/// position.
std::vector<std::size_t> dominance_count_order(const RankedPopulation& pop);

}  // namespace advaudio
