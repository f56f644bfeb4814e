#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "boim/core.hpp"
#include "boim/diffusion.hpp"
#include "boim/graph.hpp"
#include "boim/rng.hpp"
#include "boim/spread_oracle.hpp"

namespace boim {

/// Combined-reachability bottom-k sketches over r sampled live-edge instances.
struct SketchSet {
  int k = 0;
  int instances = 0;
  NodeId node_count = 0;
  /// Per node, ascending ranks of the (node, instance) pairs it reaches; at most k.
  std::vector<std::vector<double>> ranks;
  /// The sampled instances, kept for per-node frequency queries.
  std::vector<LiveEdges> realizations;
};

/// k = floor(eps^-2 ln(1/delta)).
int bottom_k_size(double epsilon, double delta);

/// Default instance count r = ceil(4k).
int default_instance_count(int k);

/// Draws r instances, then one uniform rank per (instance, node) pair, instance-major.
SketchSet build_sketches(const DirectedGraph& g, const WeightVector& w, int k, int instances,
                         Rng& rng);

/// Bottom-k cardinality estimate (k-1)/tau_k of the reached pairs, divided by r.
/// Falls back to the exact pair count when the union holds fewer than k ranks.
double sketch_spread_estimate(const SketchSet& sketches, const NodeSet& seeds);

/// Spread from the sketch estimator; marginals and functionals from the
/// sketch's own instances.
class SketchOracle final : public SpreadOracle {
 public:
  SketchOracle(const DirectedGraph& g, SketchSet sketches);

  NodeId node_count() const override { return sketches_.node_count; }
  double spread(const NodeSet& seeds) const override;
  Eigen::VectorXd influence_probs(const NodeSet& seeds) const override;
  double reach_functional(const NodeSet& seeds, const Eigen::VectorXd& node_values,
                          const std::function<double(double)>& outer) const override;

  const SketchSet& sketches() const noexcept { return sketches_; }

 private:
  const DirectedGraph* graph_;
  SketchSet sketches_;
  detail::RealizationTable table_;
};

struct SkimResult {
  /// The chosen prefix of `order`.
  NodeSet seeds;
  /// Full selection order (every node appears once).
  std::vector<NodeId> order;
  /// Sketch estimate of the marginal gain per unit cost of each selection.
  std::vector<double> marginal_ratio;
  /// Spread of each prefix S_1..S_|V| measured on the sampled instances.
  std::vector<double> prefix_spread;
  std::size_t best_prefix = 0;
};

/// Cost-aware SKIM: ranks are scanned in ascending order and node i is selected
/// once its residual sketch holds k * c_i / c_min entries (less the optional
/// bonus credit). Returns the prefix maximising (spread + bonus) / (c(S) + c0).
SkimResult skim_ratio_greedy(const DirectedGraph& g, const WeightVector& w, const CostVector& costs,
                             double epsilon, double delta, Rng& rng,
                             const std::function<double(const NodeSet&)>& bonus = {},
                             int instances = 0);

}  // namespace boim
