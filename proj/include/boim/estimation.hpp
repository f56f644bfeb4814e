#pragma once

#include <iosfwd>
#include <string>

#include "boim/core.hpp"
#include "boim/diffusion.hpp"
#include "boim/graph.hpp"

namespace boim {

/// Everything a policy may legally know at the start of round t: counters and
/// sums of observed weights and costs, plus the remaining budget.
///
/// The edge counter is its source node's trigger counter N^w_i, bumped whenever
/// i was influenced. Cost counters cover every node and the fixed cost.
class BanditState {
 public:
  BanditState() = default;
  BanditState(const DirectedGraph& g, double budget);

  /// Folds in one fully observed round (B_t >= 0), then advances t.
  void update(const DirectedGraph& g, const NodeSet& seeds, const FeedbackRecord& feedback);

  /// The budget-exhausting round: its costs are recorded, its diffusion is not.
  void update_costs_only(const NodeSet& seeds, const FeedbackRecord& feedback);

  long round() const noexcept { return round_; }
  double initial_budget() const noexcept { return initial_budget_; }
  /// Total paid so far; the remaining budget is initial_budget() - spent().
  double spent() const noexcept { return spent_; }
  double remaining_budget() const noexcept { return initial_budget_ - spent_; }

  const Eigen::VectorXi& weight_counts() const noexcept { return weight_counts_; }
  const Eigen::VectorXd& edge_sums() const noexcept { return edge_sums_; }
  const Eigen::VectorXi& cost_counts() const noexcept { return cost_counts_; }
  const Eigen::VectorXd& cost_sums() const noexcept { return cost_sums_; }
  long fixed_cost_count() const noexcept { return fixed_cost_count_; }
  double fixed_cost_sum() const noexcept { return fixed_cost_sum_; }

  /// Versioned key-value text; round-trips bit-for-bit.
  void write(std::ostream& out) const;
  static BanditState read(std::istream& in);

  friend bool operator==(const BanditState& a, const BanditState& b);

 private:
  void check_costs(const NodeSet& seeds, const FeedbackRecord& feedback) const;
  void record_costs(const FeedbackRecord& feedback);

  long round_ = 1;
  double initial_budget_ = 0.0;
  double spent_ = 0.0;
  Eigen::VectorXi weight_counts_;
  Eigen::VectorXd edge_sums_;
  Eigen::VectorXi cost_counts_;
  Eigen::VectorXd cost_sums_;
  long fixed_cost_count_ = 0;
  double fixed_cost_sum_ = 0.0;
};

/// Empirical edge means; 1 on edges whose source was never influenced.
WeightVector mean_weights(const BanditState& state, const DirectedGraph& g);

/// min(1, mean + sqrt(1.5 ln t / N^w_i)); 1 when the source counter is zero.
WeightVector weight_ucb(const BanditState& state, const DirectedGraph& g);

/// max(0, mean - sqrt(1.5 ln t / N^c_i)); 0 when the counter is zero.
CostVector cost_lcb(const BanditState& state);

/// delta(t) = 2 ln t + 2(|E| + 2) ln ln t + 1, evaluated at max(t, 3).
double ellipsoid_radius(long round, EdgeId edge_count);

/// sum_e N^w_{src(e)} (w_e - mean_e)^2 <= delta(t).
bool ellipsoid_contains(const BanditState& state, const DirectedGraph& g, const WeightVector& w);

}  // namespace boim
