#include "boim/bonuses.hpp"

#include <algorithm>

namespace boim {

BonusContext BonusContext::from(const BanditState& state, const DirectedGraph& g) {
  BonusContext ctx;
  ctx.radius = ellipsoid_radius(state.round(), g.edge_count());
  ctx.node_count = g.node_count();
  ctx.edge_count = g.edge_count();
  ctx.scale = Eigen::ArrayXd::Zero(g.node_count());
  const auto& counts = state.weight_counts();
  for (NodeId i = 0; i < g.node_count(); ++i)
    if (counts[i] > 0) ctx.scale[i] = ctx.radius * g.out_degree(i) / counts[i];
  ctx.cost_counts = state.cost_counts();
  return ctx;
}

double bonus4(const BonusContext& ctx, const NodeSet& seeds, const SpreadOracle& oracle) {
  if (seeds.empty()) return 0.0;
  const Eigen::VectorXd values = ctx.scale.matrix();
  return ctx.node_count *
         oracle.reach_functional(seeds, values, [](double x) { return std::sqrt(x); });
}

double bonus4(const BonusContext& ctx, const NodeSet& seeds, const DirectedGraph& g,
              const WeightVector& w, std::size_t replicates, std::uint64_t seed) {
  if (seeds.empty()) return 0.0;
  return bonus4(ctx, seeds, MonteCarloOracle(g, w, replicates, seed));
}

double bonus5(const BonusContext& ctx, const NodeSet& seeds) {
  double sum = 0.0;
  for (NodeId j : seeds) {
    const int n = ctx.cost_counts[j];
    sum += n == 0 ? 1.0 : std::min(8.0 / n, 1.0);
  }
  return ctx.node_count * std::sqrt(ctx.radius * ctx.edge_count * sum);
}

std::string_view to_string(BonusKind kind) {
  switch (kind) {
    case BonusKind::Full: return "bonus";
    case BonusKind::One: return "bonus1";
    case BonusKind::Two: return "bonus2";
    case BonusKind::Three: return "bonus3";
    case BonusKind::Four: return "bonus4";
    case BonusKind::Five: return "bonus5";
  }
  return "?";
}

BonusEvaluator::BonusEvaluator(BonusContext ctx, BonusKind kind, const SpreadOracle& oracle)
    : ctx_(std::move(ctx)), kind_(kind), oracle_(&oracle) {
  if (kind_ == BonusKind::One) singleton_cache_.assign(ctx_.node_count, -1.0);
}

double BonusEvaluator::singleton(NodeId j) const {
  double& slot = singleton_cache_[j];
  if (slot < 0.0) slot = bonus(ctx_, oracle_->influence_probs({j}));
  return slot;
}

double BonusEvaluator::operator()(const NodeSet& seeds) const {
  if (seeds.empty()) return 0.0;
  switch (kind_) {
    case BonusKind::Full: return bonus(ctx_, oracle_->influence_probs(seeds));
    case BonusKind::One: {
      double total = 0.0;
      for (NodeId j : seeds) total += singleton(j);
      return total;
    }
    case BonusKind::Two: return bonus2(ctx_, oracle_->influence_probs(seeds));
    case BonusKind::Three: return bonus3(ctx_, oracle_->influence_probs(seeds));
    case BonusKind::Four: return bonus4(ctx_, seeds, *oracle_);
    case BonusKind::Five: return bonus5(ctx_, seeds);
  }
  return 0.0;
}

double optimistic_spread(const BonusContext& ctx, const NodeSet& seeds, const SpreadOracle& oracle,
                         BonusKind kind) {
  if (seeds.empty()) return 0.0;
  return oracle.spread(seeds) + BonusEvaluator(ctx, kind, oracle)(seeds);
}

}  // namespace boim
