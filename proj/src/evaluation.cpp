#include "boim/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numbers>
#include <ostream>

#include "boim/diffusion.hpp"
#include "boim/ratio_greedy.hpp"

namespace boim {

namespace {

std::unique_ptr<SpreadOracle> truth_oracle(const DirectedGraph& g, const WeightVector& w,
                                           const TruthOptions& options) {
  if (g.edge_count() <= kMaxEnumeratedEdges) return std::make_unique<ExactOracle>(g, w);
  return std::make_unique<MonteCarloOracle>(g, w, options.replicates, options.seed);
}

std::vector<double> subset_spreads(const SpreadOracle& oracle) {
  if (auto* exact = dynamic_cast<const ExactOracle*>(&oracle)) return exact->all_subset_spreads();
  return dynamic_cast<const MonteCarloOracle&>(oracle).all_subset_spreads();
}

LambdaStar lambda_from_oracle(const DirectedGraph& g, const CostVector& c, const SpreadOracle& oracle,
                              const TruthOptions& options) {
  LambdaStar out;
  const bool exact = dynamic_cast<const ExactOracle*>(&oracle) != nullptr;
  if (g.node_count() <= kMaxBruteForceNodes) {
    out.provenance = exact ? Provenance::Exact : Provenance::EnumeratedMc;
    const std::vector<double> spreads = subset_spreads(oracle);
    std::vector<double> totals(spreads.size());
    RatioOptimum best{{}, safe_ratio(0.0, c.fixed)};
    for (std::uint64_t mask = 0; mask < spreads.size(); ++mask) {
      NodeSet s = node_set_from_mask(mask);
      totals[mask] = c.total(s);
      if (options.round_budget && totals[mask] > *options.round_budget) continue;
      const double r = safe_ratio(spreads[mask], totals[mask]);
      if (r > best.ratio || (r == best.ratio && s < best.set)) best = {std::move(s), r};
    }
    out.value = best.ratio;
    out.set = best.set;
    if (options.round_budget) {
      const double mixed = constrained_ratio_optimum(spreads, totals, *options.round_budget);
      if (mixed > out.value) {
        out.value = mixed;
        out.set.clear();
      }
    }
    return out;
  }
  out.provenance = Provenance::Approximate;
  const SetFunction f = [&oracle](const NodeSet& s) { return oracle.spread(s); };
  const GreedyChain chain = lazy_greedy_chain(f, c);
  if (options.round_budget) {
    const KnapsackChoice plan = knapsack_plan(chain, c, *options.round_budget);
    out.value = safe_ratio(plan.expected_value, plan.expected_cost);
    if (!plan.randomized) out.set = plan.chosen;
  } else {
    const std::size_t k = chain.best_prefix();
    out.value = chain.ratios[k];
    out.set = chain.prefix(k);
  }
  return out;
}

double approximation_factor(double epsilon) { return 1.0 - 1.0 / std::numbers::e - epsilon; }

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Exact: return "exact";
    case Provenance::EnumeratedMc: return "enumerated-mc";
    case Provenance::Approximate: return "approximate";
  }
  return "?";
}

LambdaStar lambda_star(const DirectedGraph& g, const WeightVector& w, const CostVector& c,
                       const TruthOptions& options) {
  validate_costs(g, c);
  if (options.round_budget && *options.round_budget < c.fixed)
    throw ValidationError("per-round budget is below the fixed cost");
  if (!options.round_budget && g.node_count() <= kMaxBruteForceNodes &&
      g.edge_count() <= kMaxEnumeratedEdges) {
    const RatioOptimum best = brute_force_ratio(g, w, c);
    return {best.ratio, best.set, Provenance::Exact};
  }
  const auto oracle = truth_oracle(g, w, options);
  return lambda_from_oracle(g, c, *oracle, options);
}

double gap(const DirectedGraph& g, const WeightVector& w, const CostVector& c, double lambda,
           double epsilon, const NodeSet& seeds) {
  return approximation_factor(epsilon) * lambda * c.total(seeds) - exact_spread(g, w, seeds);
}

GapEvaluator::GapEvaluator(const DirectedGraph& g, WeightVector w, CostVector c, double epsilon,
                           TruthOptions options)
    : graph_(&g), costs_(std::move(c)), factor_(approximation_factor(epsilon)) {
  validate_costs(g, costs_);
  oracle_ = truth_oracle(g, w, options);
  if (!options.round_budget && g.node_count() <= kMaxBruteForceNodes &&
      g.edge_count() <= kMaxEnumeratedEdges) {
    const RatioOptimum best = brute_force_ratio(g, w, costs_);
    lambda_ = {best.ratio, best.set, Provenance::Exact};
  } else {
    lambda_ = lambda_from_oracle(g, costs_, *oracle_, options);
  }
}

Estimate GapEvaluator::spread(const NodeSet& seeds) const {
  {
    const std::lock_guard lock(cache_mutex_);
    auto it = cache_.find(seeds);
    if (it != cache_.end()) return it->second;
  }
  Estimate e;
  if (auto* mc = dynamic_cast<const MonteCarloOracle*>(oracle_.get())) {
    e = mc->spread_estimate(seeds);
    e.mean = mc->spread(seeds);
  } else {
    e.mean = oracle_->spread(seeds);
  }
  const std::lock_guard lock(cache_mutex_);
  cache_.emplace(seeds, e);
  return e;
}

double GapEvaluator::gap(const NodeSet& seeds) const {
  return factor_ * lambda_.value * costs_.total(seeds) - spread(seeds).mean;
}

std::vector<double> trace_gaps(const EpisodeTrace& trace, const GapEvaluator& evaluator) {
  std::vector<double> gaps;
  gaps.reserve(trace.counted_rounds());
  for (std::size_t k = 0; k < trace.counted_rounds(); ++k)
    gaps.push_back(evaluator.gap(trace.rounds[k].seeds));
  return gaps;
}

std::vector<CurvePoint> regret_curve(const EpisodeTrace& trace, const std::vector<double>& gaps) {
  if (gaps.size() != trace.counted_rounds())
    throw ValidationError("one gap per counted round is required");
  std::vector<CurvePoint> curve;
  curve.reserve(gaps.size());
  double consumed = 0.0, cumulative = 0.0;
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    consumed += trace.rounds[k].paid;
    cumulative += gaps[k];
    curve.push_back({consumed, cumulative});
  }
  return curve;
}

std::vector<double> curve_at(const std::vector<CurvePoint>& curve,
                             const std::vector<double>& checkpoints) {
  std::vector<double> out;
  out.reserve(checkpoints.size());
  for (double x : checkpoints) {
    auto it = std::upper_bound(curve.begin(), curve.end(), x,
                               [](double v, const CurvePoint& p) { return v < p.budget_consumed; });
    out.push_back(it == curve.begin() ? 0.0 : std::prev(it)->cumulative_gap);
  }
  return out;
}

std::vector<double> budget_checkpoints(double budget) {
  std::vector<double> out;
  for (int k = 1; k <= 100; ++k) out.push_back(budget * k / 100.0);
  return out;
}

std::vector<double> average_series(const std::vector<std::vector<double>>& series) {
  if (series.empty()) return {};
  std::vector<double> mean(series.front().size(), 0.0);
  for (const auto& s : series) {
    if (s.size() != mean.size()) throw ValidationError("series lengths differ");
    for (std::size_t k = 0; k < s.size(); ++k) mean[k] += s[k];
  }
  for (double& v : mean) v /= static_cast<double>(series.size());
  return mean;
}

DiagnosticsReport diagnostics(const DirectedGraph& g, const GapEvaluator& evaluator) {
  const NodeId n = g.node_count();
  if (n > kMaxDiagnosticNodes)
    throw GuardError("diagnostics enumerate subsets and need |V| <= 12");
  DiagnosticsReport report;
  report.nodes.assign(n, {std::numeric_limits<double>::infinity(), 0.0});
  const Eigen::VectorXd degrees = g.out_degrees().cast<double>();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    const NodeSet s = node_set_from_mask(mask);
    const Eigen::VectorXd p = evaluator.oracle().influence_probs(s);
    const double weighted = degrees.dot(p);
    const double d = evaluator.gap(s);
    for (NodeId i = 0; i < n; ++i) {
      if (!(p[i] > 0.0)) continue;
      auto& node = report.nodes[i];
      if (d > 0.0) node.gap_min = std::min(node.gap_min, d);
      node.p_max = std::max(node.p_max, weighted);
    }
  }
  const double lambda = evaluator.lambda_star().value;
  for (NodeId i = 0; i < n; ++i) {
    const auto& node = report.nodes[i];
    report.cucb_bound_coefficient +=
        n * (lambda + degrees[i] * node.p_max * n) / node.gap_min;
  }
  return report;
}

void write_trace_csv_header(std::ostream& out) {
  out << "run_id,t,budget_consumed,seed_set_size,paid_cost,spread,gap,cumulative_gap\n";
}

void write_trace_csv(std::ostream& out, int run_id, const EpisodeTrace& trace,
                     const std::vector<double>& gaps) {
  const auto curve = regret_curve(trace, gaps);
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const RoundLog& r = trace.rounds[k];
    out << run_id << ',' << r.t << ',' << curve[k].budget_consumed << ',' << r.seeds.size() << ','
        << r.paid << ',' << r.spread << ',' << gaps[k] << ',' << curve[k].cumulative_gap << '\n';
  }
  out.precision(precision);
}

}  // namespace boim
