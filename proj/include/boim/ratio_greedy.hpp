#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "boim/core.hpp"
#include "boim/graph.hpp"
#include "boim/rng.hpp"

namespace boim {

/// Set-function oracle; called with sorted seed sets.
using SetFunction = std::function<double(const NodeSet&)>;

/// value / cost, with x/0 read as +inf for x > 0 and as 0 otherwise.
double safe_ratio(double value, double cost);

/// The nested sets S_0 = {} < S_1 < ... < S_|V| built by the bang-per-buck greedy.
struct GreedyChain {
  std::vector<NodeId> order;        // node added at step k+1
  std::vector<double> bang_per_buck;  // its marginal gain over its cost
  std::vector<double> values;       // f(S_k), k = 0..|V|
  std::vector<double> totals;       // c(S_k) + c0
  std::vector<double> ratios;       // f(S_k) / (c(S_k) + c0)

  std::size_t size() const noexcept { return order.size(); }
  NodeSet prefix(std::size_t k) const;
  /// argmax_k ratios[k] over k <= last; the smallest k wins ties.
  std::size_t best_prefix(std::size_t last) const;
  std::size_t best_prefix() const { return best_prefix(order.size()); }
};

/// Zero-cost nodes come first in id order. The rest are taken by largest
/// marginal/cost, lowest id on ties, with stale bounds refreshed only when
/// they reach the top of the queue. Throws ValidationError on a marginal
/// below -1e-9 (relative), which signals a non-monotone oracle.
GreedyChain lazy_greedy_chain(const SetFunction& f, const CostVector& costs);

/// Same chain by re-evaluating every candidate at every step.
GreedyChain eager_greedy_chain(const SetFunction& f, const CostVector& costs);

/// The best prefix of the lazy chain.
NodeSet lazy_greedy_ratio(const SetFunction& f, const CostVector& costs);

/// Output of the budget-constrained variant. When `randomized`, `chosen` is
/// `upper` with probability `upper_probability` and `lower` otherwise.
struct KnapsackChoice {
  NodeSet chosen;
  bool randomized = false;
  NodeSet lower;
  NodeSet upper;
  double upper_probability = 0.0;
  double expected_value = 0.0;
  double expected_cost = 0.0;
};

/// Resolves the per-round budget b on an existing chain without sampling.
KnapsackChoice knapsack_plan(const GreedyChain& chain, const CostVector& costs, double b);

/// Builds the lazy chain, restricts the ratio argmax to S_0..S_j where S_j is
/// the first prefix over budget, and splits between S_{j-1} and S_j so the
/// expected cost is b when S_j wins. Throws ValidationError when b < c0.
KnapsackChoice greedy_ratio_knapsack(const SetFunction& f, const CostVector& costs, double b,
                                     Rng& rng);

struct RatioOptimum {
  NodeSet set;
  double ratio = 0.0;
};

/// Largest node count accepted by the subset enumerations.
inline constexpr NodeId kMaxBruteForceNodes = 20;

/// max_S f(S) / (c(S) + c0) over all 2^n subsets; lexicographically smallest set on ties.
RatioOptimum brute_force_ratio(const SetFunction& f, NodeId node_count, const CostVector& costs);

/// Same, with exact spreads of (g, w). Needs |V| <= 20 and |E| <= 25.
RatioOptimum brute_force_ratio(const DirectedGraph& g, const WeightVector& w,
                               const CostVector& costs);

/// Best ratio of expected value to expected cost over distributions on subsets
/// whose expected total cost is at most b. `values[m]` and `totals[m]` describe
/// the subset with bitmask m. Uses the upper concave hull of (total, value).
double constrained_ratio_optimum(const std::vector<double>& values,
                                 const std::vector<double>& totals, double b);

/// Lazy greedy on marginal gains of a submodular f, stopping once the best
/// gain is <= 0. Lowest id wins ties.
NodeSet lazy_greedy_marginal(const SetFunction& f, NodeId node_count);

}  // namespace boim
