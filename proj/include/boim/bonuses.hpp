#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include "boim/core.hpp"
#include "boim/estimation.hpp"
#include "boim/graph.hpp"
#include "boim/spread_oracle.hpp"

namespace boim {

/// Round-t quantities shared by every bonus: delta(t), |V|, |E|, and the
/// per-node scale delta(t) d_i / N^w_i (zero for nodes never influenced).
struct BonusContext {
  double radius = 0.0;
  NodeId node_count = 0;
  EdgeId edge_count = 0;
  Eigen::ArrayXd scale;
  Eigen::VectorXi cost_counts;

  static BonusContext from(const BanditState& state, const DirectedGraph& g);
};

/// |V| sqrt( sum_i scale_i p_i^2 ).
template <typename Derived>
double bonus(const BonusContext& ctx, const Eigen::MatrixBase<Derived>& probs) {
  return ctx.node_count * std::sqrt((ctx.scale * probs.array().square()).sum());
}

/// Sum of singleton bonuses; column j holds p(.; {s_j}).
template <typename Derived>
double bonus1(const BonusContext& ctx, const Eigen::MatrixBase<Derived>& singleton_probs) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < singleton_probs.cols(); ++j) total += bonus(ctx, singleton_probs.col(j));
  return total;
}

/// |V| sum_i p_i sqrt(scale_i).
template <typename Derived>
double bonus2(const BonusContext& ctx, const Eigen::MatrixBase<Derived>& probs) {
  return ctx.node_count * (probs.array() * ctx.scale.sqrt()).sum();
}

/// |V| sqrt( sum_i scale_i p_i ).
template <typename Derived>
double bonus3(const BonusContext& ctx, const Eigen::MatrixBase<Derived>& probs) {
  return ctx.node_count * std::sqrt((ctx.scale * probs.array()).sum());
}

/// |V| E[ sqrt( sum of scale_i over nodes reached from S ) ], the expectation
/// taken under whatever distribution `oracle` was built on.
double bonus4(const BonusContext& ctx, const NodeSet& seeds, const SpreadOracle& oracle);

/// Monte-Carlo form of bonus4 over W ~ Bernoulli(w).
double bonus4(const BonusContext& ctx, const NodeSet& seeds, const DirectedGraph& g,
              const WeightVector& w, std::size_t replicates, std::uint64_t seed);

/// |V| sqrt( delta(t) sum_{j in S} |E| min(8 / N^c_j, 1) ); needs no weight estimate.
double bonus5(const BonusContext& ctx, const NodeSet& seeds);

enum class BonusKind { Full, One, Two, Three, Four, Five };

std::string_view to_string(BonusKind kind);

/// Evaluates one bonus kind with the probabilities of `oracle` (built at w-bar).
/// Caches singleton bonuses, which makes Bonus_1 cheap inside a greedy loop.
class BonusEvaluator {
 public:
  BonusEvaluator(BonusContext ctx, BonusKind kind, const SpreadOracle& oracle);

  double operator()(const NodeSet& seeds) const;
  const BonusContext& context() const noexcept { return ctx_; }
  BonusKind kind() const noexcept { return kind_; }

 private:
  double singleton(NodeId j) const;

  BonusContext ctx_;
  BonusKind kind_;
  const SpreadOracle* oracle_;
  mutable std::vector<double> singleton_cache_;
};

/// sigma(S; w-bar) + Bonus_kind(S; w-bar), with `oracle` evaluating at w-bar.
double optimistic_spread(const BonusContext& ctx, const NodeSet& seeds, const SpreadOracle& oracle,
                         BonusKind kind);

}  // namespace boim
