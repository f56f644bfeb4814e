#include "boim/policies.hpp"

#include <cmath>

namespace boim {

std::string_view to_string(PolicyVariant v) {
  switch (v) {
    case PolicyVariant::Cucb: return "cucb";
    case PolicyVariant::Cucb1: return "cucb1";
    case PolicyVariant::Cucb4: return "cucb4";
    case PolicyVariant::Cucb5: return "cucb5";
    case PolicyVariant::CucbPlus: return "cucb_plus";
    case PolicyVariant::Regularized: return "regularized";
  }
  return "?";
}

PolicyVariant parse_policy_variant(std::string_view text) {
  for (auto v : {PolicyVariant::Cucb, PolicyVariant::Cucb1, PolicyVariant::Cucb4,
                 PolicyVariant::Cucb5, PolicyVariant::CucbPlus, PolicyVariant::Regularized})
    if (text == to_string(v)) return v;
  throw ValidationError("unknown policy variant '" + std::string(text) + "'");
}

std::string_view to_string(OracleKind k) {
  switch (k) {
    case OracleKind::Auto: return "auto";
    case OracleKind::Exact: return "exact";
    case OracleKind::MonteCarlo: return "mc";
  }
  return "?";
}

OracleKind parse_oracle_kind(std::string_view text) {
  for (auto k : {OracleKind::Auto, OracleKind::Exact, OracleKind::MonteCarlo})
    if (text == to_string(k)) return k;
  throw ValidationError("unknown oracle kind '" + std::string(text) + "'");
}

std::string_view to_string(ConditionOutcome c) {
  switch (c) {
    case ConditionOutcome::NotApplicable: return "n/a";
    case ConditionOutcome::Accepted: return "accepted";
    case ConditionOutcome::Replaced: return "replaced";
  }
  return "?";
}

void PolicyConfig::validate() const {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (variant == PolicyVariant::Regularized && !(lambda > 0.0))
    throw ValidationError("the regularized policy needs lambda > 0");
  if (round_budget && !known_costs)
    throw ValidationError("a per-round budget requires known costs");
  if (max_rounds < 1) throw ValidationError("max_rounds must be at least 1");
  if (schedule.min_replicates < 1) throw ValidationError("min_replicates must be at least 1");
}

Policy::Policy(const DirectedGraph& g, PolicyConfig config, std::optional<CostVector> known_costs)
    : graph_(&g), config_(std::move(config)), known_costs_(std::move(known_costs)) {
  config_.validate();
  if (config_.known_costs && !known_costs_)
    throw ValidationError("known_costs is set but no cost vector was supplied");
  if (known_costs_) validate_costs(g, *known_costs_);
}

std::unique_ptr<SpreadOracle> Policy::make_oracle(const WeightVector& w, long round) const {
  const bool exact = config_.oracle == OracleKind::Exact ||
                     (config_.oracle == OracleKind::Auto && graph_->edge_count() <= kAutoExactEdges);
  if (exact) return std::make_unique<ExactOracle>(*graph_, w);
  return std::make_unique<MonteCarloOracle>(*graph_, w,
                                            config_.schedule.replicates(round, graph_->node_count()),
                                            derive_seed(config_.seed, round));
}

CostVector Policy::round_costs(const BanditState& state) const {
  if (config_.known_costs) return *known_costs_;
  return cost_lcb(state);
}

NodeSet Policy::maximize_ratio(const SetFunction& f, const CostVector& costs, long round) const {
  if (!config_.round_budget) return lazy_greedy_ratio(f, costs);
  Rng coin(derive_seed(config_.seed, round, 1));
  return greedy_ratio_knapsack(f, costs, *config_.round_budget, coin).chosen;
}

namespace {

Selection plain(NodeSet seeds) {
  Selection sel;
  sel.seeds = std::move(seeds);
  return sel;
}

}  // namespace

Selection Policy::select(const BanditState& state) const {
  switch (config_.variant) {
    case PolicyVariant::Cucb: return select_cucb(state);
    case PolicyVariant::Cucb1: return select_cucb_k(state, BonusKind::One);
    case PolicyVariant::Cucb4: return select_cucb_k(state, BonusKind::Four);
    case PolicyVariant::Cucb5: return select_cucb_k(state, BonusKind::Five);
    case PolicyVariant::CucbPlus: return select_cucb_plus(state);
    case PolicyVariant::Regularized: return select_regularized(state);
  }
  return {};
}

Selection Policy::select_cucb(const BanditState& state) const {
  const auto oracle = make_oracle(weight_ucb(state, *graph_), state.round());
  const SpreadOracle& o = *oracle;
  return plain(maximize_ratio([&o](const NodeSet& s) { return o.spread(s); }, round_costs(state),
                              state.round()));
}

std::optional<NodeId> augmentation_node(const BanditState& state, const DirectedGraph& g,
                                        const NodeSet& seeds, BonusKind kind) {
  const double radius = ellipsoid_radius(state.round(), g.edge_count());
  const bool strict = kind == BonusKind::Five || kind == BonusKind::Full;
  const double threshold = strict ? radius : g.edge_count() * radius;
  for (NodeId j = 0; j < g.node_count(); ++j) {
    if (contains(seeds, j)) continue;
    const double n = state.weight_counts()[j];
    if (strict ? n < threshold : n <= threshold) return j;
  }
  return std::nullopt;
}

Selection Policy::select_cucb_k(const BanditState& state, BonusKind kind) const {
  const long t = state.round();
  const CostVector costs = round_costs(state);
  // Both oracles share the round seed, so the comparison uses common random numbers.
  const auto ucb_oracle = make_oracle(weight_ucb(state, *graph_), t);
  const auto mean_oracle = make_oracle(mean_weights(state, *graph_), t);
  const SpreadOracle& ou = *ucb_oracle;
  const SpreadOracle& om = *mean_oracle;
  const BonusEvaluator extra(BonusContext::from(state, *graph_), kind, om);

  Selection sel;
  sel.seeds = maximize_ratio([&ou](const NodeSet& s) { return ou.spread(s); }, costs, t);
  if (ou.spread(sel.seeds) <= om.spread(sel.seeds) + extra(sel.seeds)) {
    sel.condition = ConditionOutcome::Accepted;
  } else {
    sel.condition = ConditionOutcome::Replaced;
    sel.seeds = maximize_ratio([&](const NodeSet& s) { return om.spread(s) + extra(s); }, costs, t);
  }
  sel.augmented = augmentation_node(state, *graph_, sel.seeds, kind);
  if (sel.augmented) sel.seeds = with_node(sel.seeds, *sel.augmented);
  return sel;
}

Selection Policy::select_cucb_plus(const BanditState& state) const {
  return select_cucb_k(state, BonusKind::Full);
}

Selection Policy::select_regularized(const BanditState& state) const {
  const auto oracle = make_oracle(weight_ucb(state, *graph_), state.round());
  const SpreadOracle& o = *oracle;
  const CostVector costs = round_costs(state);
  const double lambda = config_.lambda;
  return plain(lazy_greedy_marginal(
      [&](const NodeSet& s) {
        double c = 0.0;
        for (NodeId i : s) c += costs.node[i];
        return o.spread(s) - lambda * c;
      },
      graph_->node_count()));
}

EpisodeTrace run_episode(Environment& env, const PolicyConfig& config, double budget) {
  if (!(budget > 0.0)) throw ValidationError("total budget must be positive");
  const DirectedGraph& g = env.graph();
  const Policy policy(g, config,
                      config.known_costs ? std::optional<CostVector>(env.true_costs()) : std::nullopt);
  BanditState state(g, budget);
  EpisodeTrace trace;
  trace.budget = budget;
  for (long round = 1; round <= config.max_rounds; ++round) {
    Selection sel = policy.select(state);
    const FeedbackRecord fb = env.play(sel.seeds);
    const bool within = state.spent() + fb.paid() <= budget;
    if (within)
      state.update(g, sel.seeds, fb);
    else
      state.update_costs_only(sel.seeds, fb);
    trace.rounds.push_back({round, std::move(sel.seeds), fb.paid(), fb.realized_spread,
                            sel.condition, sel.augmented, state.remaining_budget()});
    if (!within) {
      trace.exhausted = true;
      break;
    }
  }
  return trace;
}

}  // namespace boim
