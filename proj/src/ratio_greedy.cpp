#include "boim/ratio_greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "boim/spread_oracle.hpp"

namespace boim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_marginal(double gain, double base, NodeId node) {
  if (gain < -1e-9 * std::max(1.0, std::abs(base)))
    throw ValidationError("set function is not monotone: node " + std::to_string(node) +
                          " has marginal gain " + std::to_string(gain));
}

double bang(double gain, double cost) { return cost > 0.0 ? gain / cost : kInf; }

struct Candidate {
  double bound;
  NodeId node;
  std::size_t stamp;
  double value = 0.0;  // f(S + node) when the bound was computed
};

struct CandidateOrder {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.node > b.node;
  }
};

class ChainBuilder {
 public:
  ChainBuilder(const SetFunction& f, const CostVector& costs) : f_(f), costs_(costs) {
    chain_.values.push_back(f({}));
    chain_.totals.push_back(costs.fixed);
    chain_.ratios.push_back(safe_ratio(chain_.values[0], costs.fixed));
  }

  const NodeSet& current() const { return current_; }
  double value() const { return chain_.values.back(); }

  void add(NodeId j, double new_value, double bpb) {
    current_ = with_node(current_, j);
    chain_.order.push_back(j);
    chain_.bang_per_buck.push_back(bpb);
    chain_.values.push_back(new_value);
    chain_.totals.push_back(chain_.totals.back() + costs_.node[j]);
    chain_.ratios.push_back(safe_ratio(new_value, chain_.totals.back()));
  }

  GreedyChain take() { return std::move(chain_); }

 private:
  const SetFunction& f_;
  const CostVector& costs_;
  NodeSet current_;
  GreedyChain chain_;
};

}  // namespace

double safe_ratio(double value, double cost) {
  if (cost > 0.0) return value / cost;
  return value > 0.0 ? kInf : 0.0;
}

NodeSet GreedyChain::prefix(std::size_t k) const {
  return make_node_set({order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k)});
}

std::size_t GreedyChain::best_prefix(std::size_t last) const {
  std::size_t best = 0;
  for (std::size_t k = 1; k <= last && k < ratios.size(); ++k)
    if (ratios[k] > ratios[best]) best = k;
  return best;
}

GreedyChain lazy_greedy_chain(const SetFunction& f, const CostVector& costs) {
  const auto n = static_cast<NodeId>(costs.node.size());
  ChainBuilder builder(f, costs);

  std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> queue;
  for (NodeId j = 0; j < n; ++j) {
    if (costs.node[j] > 0.0) continue;
    const double v = f(with_node(builder.current(), j));
    check_marginal(v - builder.value(), builder.value(), j);
    builder.add(j, v, kInf);
  }
  std::size_t step = builder.current().size();
  for (NodeId j = 0; j < n; ++j) {
    if (costs.node[j] <= 0.0) continue;
    const double v = f(with_node(builder.current(), j));
    check_marginal(v - builder.value(), builder.value(), j);
    queue.push({bang(v - builder.value(), costs.node[j]), j, step, v});
  }
  while (!queue.empty()) {
    const Candidate top = queue.top();
    queue.pop();
    if (top.stamp == step) {
      builder.add(top.node, top.value, top.bound);
      ++step;
      continue;
    }
    const double v = f(with_node(builder.current(), top.node));
    check_marginal(v - builder.value(), builder.value(), top.node);
    queue.push({bang(v - builder.value(), costs.node[top.node]), top.node, step, v});
  }
  return builder.take();
}

GreedyChain eager_greedy_chain(const SetFunction& f, const CostVector& costs) {
  const auto n = static_cast<NodeId>(costs.node.size());
  ChainBuilder builder(f, costs);
  std::vector<bool> taken(n, false);
  for (NodeId j = 0; j < n; ++j) {
    if (costs.node[j] > 0.0) continue;
    const double v = f(with_node(builder.current(), j));
    check_marginal(v - builder.value(), builder.value(), j);
    builder.add(j, v, kInf);
    taken[j] = true;
  }
  for (std::size_t step = builder.current().size(); step < static_cast<std::size_t>(n); ++step) {
    NodeId best = -1;
    double best_bpb = -kInf, best_value = 0.0;
    for (NodeId j = 0; j < n; ++j) {
      if (taken[j]) continue;
      const double v = f(with_node(builder.current(), j));
      check_marginal(v - builder.value(), builder.value(), j);
      const double bpb = bang(v - builder.value(), costs.node[j]);
      if (best < 0 || bpb > best_bpb) {
        best = j;
        best_bpb = bpb;
        best_value = v;
      }
    }
    builder.add(best, best_value, best_bpb);
    taken[best] = true;
  }
  return builder.take();
}

NodeSet lazy_greedy_ratio(const SetFunction& f, const CostVector& costs) {
  const GreedyChain chain = lazy_greedy_chain(f, costs);
  return chain.prefix(chain.best_prefix());
}

KnapsackChoice knapsack_plan(const GreedyChain& chain, const CostVector& costs, double b) {
  if (!(b >= costs.fixed))
    throw ValidationError("per-round budget is below the fixed cost");
  std::size_t j = 0;
  while (j < chain.totals.size() && chain.totals[j] <= b) ++j;

  KnapsackChoice out;
  if (j == chain.totals.size()) {
    const std::size_t k = chain.best_prefix();
    out.chosen = chain.prefix(k);
    out.expected_value = chain.values[k];
    out.expected_cost = chain.totals[k];
    return out;
  }
  const std::size_t k = chain.best_prefix(j);
  if (k != j) {
    out.chosen = chain.prefix(k);
    out.expected_value = chain.values[k];
    out.expected_cost = chain.totals[k];
    return out;
  }
  // j >= 1 here: S_0 costs c0 <= b.
  const double p = (b - chain.totals[j - 1]) / costs.node[chain.order[j - 1]];
  out.randomized = true;
  out.lower = chain.prefix(j - 1);
  out.upper = chain.prefix(j);
  out.upper_probability = p;
  out.expected_value = p * chain.values[j] + (1.0 - p) * chain.values[j - 1];
  out.expected_cost = p * chain.totals[j] + (1.0 - p) * chain.totals[j - 1];
  return out;
}

KnapsackChoice greedy_ratio_knapsack(const SetFunction& f, const CostVector& costs, double b,
                                     Rng& rng) {
  if (!(b >= costs.fixed))
    throw ValidationError("per-round budget is below the fixed cost");
  KnapsackChoice out = knapsack_plan(lazy_greedy_chain(f, costs), costs, b);
  if (out.randomized) out.chosen = uniform01(rng) < out.upper_probability ? out.upper : out.lower;
  return out;
}

RatioOptimum brute_force_ratio(const SetFunction& f, NodeId node_count, const CostVector& costs) {
  if (node_count > kMaxBruteForceNodes)
    throw GuardError("brute-force ratio needs |V| <= 20; use the approximate lambda* instead");
  RatioOptimum best{{}, safe_ratio(f({}), costs.fixed)};
  const std::uint64_t subsets = std::uint64_t{1} << node_count;
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    NodeSet s = node_set_from_mask(mask);
    const double r = safe_ratio(f(s), costs.total(s));
    if (r > best.ratio || (r == best.ratio && s < best.set)) best = {std::move(s), r};
  }
  return best;
}

RatioOptimum brute_force_ratio(const DirectedGraph& g, const WeightVector& w,
                               const CostVector& costs) {
  if (g.node_count() > kMaxBruteForceNodes)
    throw GuardError("brute-force ratio needs |V| <= 20; use the approximate lambda* instead");
  const std::vector<double> spreads = ExactOracle(g, w).all_subset_spreads();
  RatioOptimum best{{}, safe_ratio(0.0, costs.fixed)};
  for (std::uint64_t mask = 1; mask < spreads.size(); ++mask) {
    NodeSet s = node_set_from_mask(mask);
    const double r = safe_ratio(spreads[mask], costs.total(s));
    if (r > best.ratio || (r == best.ratio && s < best.set)) best = {std::move(s), r};
  }
  return best;
}

double constrained_ratio_optimum(const std::vector<double>& values,
                                 const std::vector<double>& totals, double b) {
  double best = 0.0;
  std::vector<std::pair<double, double>> points;
  points.reserve(values.size());
  for (std::size_t m = 0; m < values.size(); ++m) {
    if (totals[m] <= b) best = std::max(best, safe_ratio(values[m], totals[m]));
    points.emplace_back(totals[m], values[m]);
  }
  // Mixtures at expected cost exactly b: the upper concave hull evaluated at b.
  std::sort(points.begin(), points.end());
  std::vector<std::pair<double, double>> hull;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& p = points[k];
    if (k + 1 < points.size() && points[k + 1].first == p.first) continue;  // keep the top value
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& m = hull.back();
      const double cross = (m.first - a.first) * (p.second - a.second) -
                           (m.second - a.second) * (p.first - a.first);
      if (cross >= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  for (std::size_t k = 1; k < hull.size(); ++k) {
    const auto& [c0, v0] = hull[k - 1];
    const auto& [c1, v1] = hull[k];
    if (c0 <= b && b < c1) {
      const double p = (b - c0) / (c1 - c0);
      best = std::max(best, safe_ratio(v0 + p * (v1 - v0), b));
    }
  }
  return best;
}

NodeSet lazy_greedy_marginal(const SetFunction& f, NodeId node_count) {
  NodeSet current;
  double value = f(current);
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> queue;
  std::size_t step = 0;
  for (NodeId j = 0; j < node_count; ++j) {
    const double v = f({j});
    queue.push({v - value, j, step, v});
  }
  while (!queue.empty()) {
    const Candidate top = queue.top();
    queue.pop();
    if (top.bound <= 0.0) break;
    if (top.stamp == step) {
      current = with_node(current, top.node);
      value = top.value;
      ++step;
      continue;
    }
    const double v = f(with_node(current, top.node));
    queue.push({v - value, top.node, step, v});
  }
  return current;
}

}  // namespace boim
