#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "boim/core.hpp"
#include "boim/graph.hpp"
#include "boim/rng.hpp"

namespace boim {

/// One independent-cascade draw: entry e is 1 iff edge e is live.
using LiveEdges = Eigen::Array<std::uint8_t, Eigen::Dynamic, 1>;

/// What the agent sees after playing a seed set for one round.
struct FeedbackRecord {
  /// (edge-id, W_e) for every out-edge of every influenced node, ascending edge-id.
  std::vector<std::pair<EdgeId, std::uint8_t>> observed_edges;
  /// Realized costs of the seeds, ascending node-id.
  std::vector<std::pair<NodeId, double>> seed_costs;
  double fixed_cost = 0.0;
  NodeSet influenced;
  int realized_spread = 0;

  double paid() const {
    double total = 0.0;
    for (const auto& [node, cost] : seed_costs) total += cost;
    return total + fixed_cost;
  }
};

/// Largest |E| accepted by the enumeration routines.
inline constexpr EdgeId kMaxEnumeratedEdges = 25;

/// Each W_e ~ Bernoulli(w_e) independently, drawn in edge-id order.
LiveEdges sample_realization(const WeightVector& w, Rng& rng);

/// Nodes reachable from `seeds` over live edges (seeds included), ascending.
NodeSet reachable_set(const DirectedGraph& g, const LiveEdges& live, const NodeSet& seeds);

FeedbackRecord edge_level_feedback(const DirectedGraph& g, const LiveEdges& live,
                                   const NodeSet& seeds, const CostVector& realized_costs);

/// Calls visit(live, probability) for every realization with nonzero probability.
/// Edges with weight 0 or 1 are fixed, so only fractional edges are branched on.
void for_each_realization(const DirectedGraph& g, const WeightVector& w,
                          const std::function<void(const LiveEdges&, double)>& visit);

/// p_i(S; w) by full enumeration. Throws GuardError when |E| > kMaxEnumeratedEdges.
Eigen::VectorXd exact_influence_probs(const DirectedGraph& g, const WeightVector& w,
                                      const NodeSet& seeds);

/// sigma(S; w) = sum_i p_i(S; w).
double exact_spread(const DirectedGraph& g, const WeightVector& w, const NodeSet& seeds);

void check_seed_range(const DirectedGraph& g, const NodeSet& seeds);

}  // namespace boim
