#pragma once

#include <cstdint>

#include "boim/core.hpp"
#include "boim/diffusion.hpp"
#include "boim/graph.hpp"
#include "boim/rng.hpp"

namespace boim {

/// Hidden truth of one episode: w*, c*, and the cost noise. Realized costs are
/// c* + U(-h, h) with h = min(noise, c*, 1 - c*), so they stay in [0, 1] and
/// average exactly c*. noise = 0 gives deterministic costs.
class Environment {
 public:
  Environment(const DirectedGraph& g, WeightVector weights, CostVector costs, double cost_noise,
              std::uint64_t seed);

  /// Draws W and the costs for one round and returns what the agent observes.
  FeedbackRecord play(const NodeSet& seeds);

  const DirectedGraph& graph() const noexcept { return *graph_; }
  const WeightVector& true_weights() const noexcept { return weights_; }
  const CostVector& true_costs() const noexcept { return costs_; }
  double cost_noise() const noexcept { return noise_; }

 private:
  double realize(double mean);

  const DirectedGraph* graph_;
  WeightVector weights_;
  CostVector costs_;
  double noise_;
  Rng rng_;
};

}  // namespace boim
