#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "boim/core.hpp"
#include "boim/diffusion.hpp"
#include "boim/graph.hpp"

namespace boim {

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Estimator of sigma(S; w) and p_i(S; w) for a fixed graph and weight vector.
class SpreadOracle {
 public:
  virtual ~SpreadOracle() = default;

  virtual NodeId node_count() const = 0;
  virtual double spread(const NodeSet& seeds) const = 0;
  virtual Eigen::VectorXd influence_probs(const NodeSet& seeds) const = 0;

  /// E[ outer( sum of node_values over nodes reached from `seeds` ) ].
  virtual double reach_functional(const NodeSet& seeds, const Eigen::VectorXd& node_values,
                                  const std::function<double(double)>& outer) const = 0;
};

namespace detail {

/// Weighted collection of live-edge draws. Graphs with at most 64 nodes keep a
/// per-draw, per-node reachability bitmask; larger graphs keep live-edge bits
/// and traverse on demand.
class RealizationTable {
 public:
  RealizationTable(const DirectedGraph& g) : graph_(&g) {}

  void add(const LiveEdges& live, double weight);
  /// Mask-mode draw given per-node live out-neighbour bitmasks.
  void add_adjacency(const std::uint64_t* adjacency, double weight);
  void reserve(std::size_t draws);
  bool uses_masks() const noexcept { return graph_->node_count() <= 64; }
  std::size_t size() const noexcept { return weights_.size(); }

  /// Calls visit(draw_index, weight, reached) with `reached` a flag per node.
  void for_each_reach(const NodeSet& seeds,
                      const std::function<void(std::size_t, double, const std::uint8_t*)>& visit) const;

  double spread(const NodeSet& seeds) const;
  Estimate spread_estimate(const NodeSet& seeds) const;
  Eigen::VectorXd influence_probs(const NodeSet& seeds) const;
  double reach_functional(const NodeSet& seeds, const Eigen::VectorXd& node_values,
                          const std::function<double(double)>& outer) const;

  /// Weighted reach count of every subset, indexed by bitmask. Needs |V| <= 20.
  std::vector<double> all_subset_spreads() const;

  std::uint64_t reach_mask(std::size_t draw, const NodeSet& seeds) const;
  std::uint64_t reach_mask(std::size_t draw, NodeId node) const {
    return masks_[draw * static_cast<std::size_t>(graph_->node_count()) + node];
  }
  double weight(std::size_t draw) const { return weights_[draw]; }

 private:
  const DirectedGraph* graph_;
  std::vector<double> weights_;
  std::vector<std::uint64_t> masks_;
  std::vector<std::uint64_t> live_bits_;
  std::size_t words_per_draw_ = 0;
};

}  // namespace detail

/// Exact oracle by enumeration of all live-edge realizations (|E| <= 25).
/// Small instances are tabulated once; larger ones re-enumerate per query.
class ExactOracle final : public SpreadOracle {
 public:
  ExactOracle(const DirectedGraph& g, WeightVector w);

  NodeId node_count() const override { return graph_->node_count(); }
  double spread(const NodeSet& seeds) const override;
  Eigen::VectorXd influence_probs(const NodeSet& seeds) const override;
  double reach_functional(const NodeSet& seeds, const Eigen::VectorXd& node_values,
                          const std::function<double(double)>& outer) const override;

  /// sigma(S) for every subset S, indexed by bitmask. Requires |V| <= 20.
  std::vector<double> all_subset_spreads() const;

  const WeightVector& weights() const noexcept { return weights_; }

 private:
  const DirectedGraph* graph_;
  WeightVector weights_;
  std::unique_ptr<detail::RealizationTable> table_;
};

/// Monte-Carlo oracle over n replicates. Replicate r draws its edges from the
/// stream derive_seed(seed, r), so two oracles with the same seed and different
/// weights share their uniforms (common random numbers).
class MonteCarloOracle final : public SpreadOracle {
 public:
  MonteCarloOracle(const DirectedGraph& g, WeightVector w, std::size_t replicates,
                   std::uint64_t seed);

  NodeId node_count() const override { return graph_->node_count(); }
  double spread(const NodeSet& seeds) const override;
  Eigen::VectorXd influence_probs(const NodeSet& seeds) const override;
  double reach_functional(const NodeSet& seeds, const Eigen::VectorXd& node_values,
                          const std::function<double(double)>& outer) const override;

  Estimate spread_estimate(const NodeSet& seeds) const;
  /// Replicate averages for every subset, indexed by bitmask. Requires |V| <= 20.
  std::vector<double> all_subset_spreads() const;
  std::size_t replicates() const noexcept { return table_.size(); }

 private:
  const DirectedGraph* graph_;
  detail::RealizationTable table_;
};

/// Replicate schedule n_t = ceil(max(min_replicates, eps^-2 |V| ln(t + 3))), capped.
struct McSchedule {
  std::size_t min_replicates = 1000;
  double epsilon = 0.1;
  std::size_t max_replicates = 0;  // 0 = uncapped

  std::size_t replicates(long round, NodeId node_count) const;
};

}  // namespace boim
