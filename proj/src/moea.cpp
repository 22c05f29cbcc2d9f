#include "advaudio/moea.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "advaudio/error.hpp"

namespace advaudio {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const ObjectiveVector& objectives_of(const Individual& ind) {
  if (!ind.objectives) throw Error("ranking requires every member to be evaluated");
  return *ind.objectives;
}

}  // namespace

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  if (a.size() != b.size())
    throw Error("dominates: objective count mismatch (" + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()) + ")");
  bool strictly_better = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strictly_better = true;
  }
  return strictly_better;
}

std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front) {
  if (front.empty()) throw Error("crowding_distance: empty front");
  const std::size_t n = front.size();
  const std::size_t m = front[0].size();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), kInf);
    return dist;
  }

  std::vector<std::size_t> order(n);
  for (std::size_t obj = 0; obj < m; ++obj) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return front[a][obj] < front[b][obj]; });
    dist[order.front()] = kInf;
    dist[order.back()] = kInf;
    const double lo = front[order.front()][obj];
    const double hi = front[order.back()][obj];
    if (hi == lo) continue;  // degenerate objective contributes 0
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (dist[order[i]] == kInf) continue;
      dist[order[i]] += (front[order[i + 1]][obj] - front[order[i - 1]][obj]) / (hi - lo);
    }
  }
  return dist;
}

RankedPopulation fast_nondominated_sort(std::vector<Individual> pop) {
  RankedPopulation out;
  out.members = std::move(pop);
  const std::size_t n = out.members.size();
  out.front_index.assign(n, 0);
  out.crowding.assign(n, 0.0);

  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> dominator_count(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    const ObjectiveVector& op = objectives_of(out.members[p]);
    for (std::size_t q = p + 1; q < n; ++q) {
      const ObjectiveVector& oq = objectives_of(out.members[q]);
      if (dominates(op, oq)) {
        dominated[p].push_back(q);
        ++dominator_count[q];
      } else if (dominates(oq, op)) {
        dominated[q].push_back(p);
        ++dominator_count[p];
      }
    }
  }

  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i)
    if (dominator_count[i] == 0) current.push_back(i);

  std::size_t level = 0;
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : current) {
      out.front_index[p] = level;
      for (std::size_t q : dominated[p])
        if (--dominator_count[q] == 0) next.push_back(q);
    }
    fronts.push_back(std::move(current));
    current = std::move(next);
    ++level;
  }

  for (const auto& front : fronts) {
    std::vector<ObjectiveVector> objs;
    objs.reserve(front.size());
    for (std::size_t i : front) objs.push_back(objectives_of(out.members[i]));
    std::vector<double> dist = crowding_distance(objs);
    for (std::size_t k = 0; k < front.size(); ++k) out.crowding[front[k]] = dist[k];
  }
  return out;
}

RankedPopulation dominance_count_rank(std::vector<Individual> pop) {
  RankedPopulation out;
  out.members = std::move(pop);
  const std::size_t n = out.members.size();
  out.dominance_count.assign(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    const ObjectiveVector& op = objectives_of(out.members[p]);
    for (std::size_t q = p + 1; q < n; ++q) {
      const ObjectiveVector& oq = objectives_of(out.members[q]);
      if (dominates(op, oq))
        ++out.dominance_count[q];
      else if (dominates(oq, op))
        ++out.dominance_count[p];
    }
  }
  return out;
}

std::vector<std::size_t> nsga2_order(const RankedPopulation& pop) {
  if (pop.front_index.size() != pop.size())
    throw Error("nsga2_order: population lacks front indices");
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pop.front_index[a] != pop.front_index[b]) return pop.front_index[a] < pop.front_index[b];
    return pop.crowding[a] > pop.crowding[b];
  });
  return order;
}

std::vector<std::size_t> dominance_count_order(const RankedPopulation& pop) {
  if (pop.dominance_count.size() != pop.size())
    throw Error("dominance_count_order: population lacks dominance counts");
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pop.dominance_count[a] != pop.dominance_count[b])
      return pop.dominance_count[a] < pop.dominance_count[b];
    return (*pop.members[a].objectives)[0] < (*pop.members[b].objectives)[0];
  });
  return order;
}

}  // namespace advaudio
