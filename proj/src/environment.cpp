#include "boim/environment.hpp"

#include <algorithm>

namespace boim {

Environment::Environment(const DirectedGraph& g, WeightVector weights, CostVector costs,
                         double cost_noise, std::uint64_t seed)
    : graph_(&g), weights_(std::move(weights)), costs_(std::move(costs)), noise_(cost_noise),
      rng_(seed) {
  validate_weights(g, weights_);
  validate_costs(g, costs_);
  if (!(noise_ >= 0.0)) throw ValidationError("cost noise must be nonnegative");
}

double Environment::realize(double mean) {
  const double h = std::min({noise_, mean, 1.0 - mean});
  if (h <= 0.0) return mean;
  return std::clamp(mean + h * (2.0 * uniform01(rng_) - 1.0), 0.0, 1.0);
}

FeedbackRecord Environment::play(const NodeSet& seeds) {
  check_seed_range(*graph_, seeds);
  const LiveEdges live = sample_realization(weights_, rng_);
  CostVector realized;
  realized.node = costs_.node;
  for (NodeId i : seeds) realized.node[i] = realize(costs_.node[i]);
  realized.fixed = realize(costs_.fixed);
  return edge_level_feedback(*graph_, live, seeds, realized);
}

}  // namespace boim
