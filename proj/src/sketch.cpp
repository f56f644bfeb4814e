#include "boim/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace boim {

namespace {

// Live edges of each instance in CSR form, forward or reversed.
struct InstanceAdjacency {
  std::vector<std::size_t> offsets;  // (instances * n + 1)
  std::vector<NodeId> neighbours;

  std::span<const NodeId> of(int q, NodeId v, NodeId n) const {
    const std::size_t row = static_cast<std::size_t>(q) * n + v;
    return {neighbours.data() + offsets[row], neighbours.data() + offsets[row + 1]};
  }
};

InstanceAdjacency build_adjacency(const DirectedGraph& g, const std::vector<LiveEdges>& instances,
                                  bool reversed) {
  const NodeId n = g.node_count();
  InstanceAdjacency adj;
  adj.offsets.assign(instances.size() * n + 1, 0);
  for (std::size_t q = 0; q < instances.size(); ++q)
    for (EdgeId e = 0; e < g.edge_count(); ++e)
      if (instances[q][e]) {
        const NodeId from = reversed ? g.edge(e).target : g.edge(e).source;
        ++adj.offsets[q * n + from + 1];
      }
  std::partial_sum(adj.offsets.begin(), adj.offsets.end(), adj.offsets.begin());
  adj.neighbours.resize(adj.offsets.back());
  std::vector<std::size_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
  for (std::size_t q = 0; q < instances.size(); ++q)
    for (EdgeId e = 0; e < g.edge_count(); ++e)
      if (instances[q][e]) {
        const NodeId from = reversed ? g.edge(e).target : g.edge(e).source;
        const NodeId to = reversed ? g.edge(e).source : g.edge(e).target;
        adj.neighbours[cursor[q * n + from]++] = to;
      }
  return adj;
}

struct RankedPair {
  double rank;
  std::size_t pair;  // instance * n + node
};

std::vector<RankedPair> draw_ranks(std::size_t pairs, Rng& rng) {
  std::vector<RankedPair> ranked(pairs);
  for (std::size_t p = 0; p < pairs; ++p) ranked[p] = {uniform_open01(rng), p};
  // Ties resolve toward the earlier (instance, node) pair.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedPair& a, const RankedPair& b) { return a.rank < b.rank; });
  return ranked;
}

std::vector<LiveEdges> draw_instances(const WeightVector& w, int count, Rng& rng) {
  std::vector<LiveEdges> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int q = 0; q < count; ++q) out.push_back(sample_realization(w, rng));
  return out;
}

}  // namespace

int bottom_k_size(double epsilon, double delta) {
  if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0))
    throw ValidationError("sketch accuracy needs epsilon > 0 and delta in (0, 1)");
  return std::max(1, static_cast<int>(std::floor(std::log(1.0 / delta) / (epsilon * epsilon))));
}

int default_instance_count(int k) { return static_cast<int>(std::ceil(4.0 * k)); }

SketchSet build_sketches(const DirectedGraph& g, const WeightVector& w, int k, int instances,
                         Rng& rng) {
  if (k < 1 || instances < 1) throw ValidationError("sketches need k >= 1 and r >= 1");
  validate_weights(g, w);
  const NodeId n = g.node_count();
  SketchSet sk;
  sk.k = k;
  sk.instances = instances;
  sk.node_count = n;
  sk.ranks.assign(static_cast<std::size_t>(n), {});
  sk.realizations = draw_instances(w, instances, rng);
  const auto reverse = build_adjacency(g, sk.realizations, true);
  const auto ranked = draw_ranks(static_cast<std::size_t>(instances) * n, rng);

  std::vector<int> stamp(static_cast<std::size_t>(n), -1);
  std::deque<NodeId> frontier;
  int visit_id = 0;
  for (const RankedPair& rp : ranked) {
    const int q = static_cast<int>(rp.pair / n);
    const NodeId v = static_cast<NodeId>(rp.pair % n);
    ++visit_id;
    stamp[v] = visit_id;
    frontier.push_back(v);
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop_front();
      if (static_cast<int>(sk.ranks[u].size()) < k) sk.ranks[u].push_back(rp.rank);
      for (NodeId x : reverse.of(q, u, n)) {
        if (stamp[x] != visit_id) {
          stamp[x] = visit_id;
          frontier.push_back(x);
        }
      }
    }
  }
  return sk;
}

double sketch_spread_estimate(const SketchSet& sk, const NodeSet& seeds) {
  if (seeds.empty()) return 0.0;
  std::vector<double> merged;
  for (NodeId s : seeds) {
    if (s < 0 || s >= sk.node_count) throw std::out_of_range("seed out of range");
    merged.insert(merged.end(), sk.ranks[s].begin(), sk.ranks[s].end());
  }
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  const auto k = static_cast<std::size_t>(sk.k);
  if (merged.size() < k) return static_cast<double>(merged.size()) / sk.instances;
  const double tau = merged[k - 1];
  return (static_cast<double>(k) - 1.0) / tau / sk.instances;
}

SketchOracle::SketchOracle(const DirectedGraph& g, SketchSet sketches)
    : graph_(&g), sketches_(std::move(sketches)), table_(g) {
  table_.reserve(sketches_.realizations.size());
  const double weight = 1.0 / static_cast<double>(sketches_.realizations.size());
  for (const LiveEdges& live : sketches_.realizations) table_.add(live, weight);
}

double SketchOracle::spread(const NodeSet& seeds) const {
  return sketch_spread_estimate(sketches_, seeds);
}

Eigen::VectorXd SketchOracle::influence_probs(const NodeSet& seeds) const {
  check_seed_range(*graph_, seeds);
  return table_.influence_probs(seeds);
}

double SketchOracle::reach_functional(const NodeSet& seeds, const Eigen::VectorXd& node_values,
                                      const std::function<double(double)>& outer) const {
  check_seed_range(*graph_, seeds);
  return table_.reach_functional(seeds, node_values, outer);
}

SkimResult skim_ratio_greedy(const DirectedGraph& g, const WeightVector& w, const CostVector& costs,
                             double epsilon, double delta, Rng& rng,
                             const std::function<double(const NodeSet&)>& bonus, int instances) {
  const NodeId n = g.node_count();
  if (n == 0) throw ValidationError("cannot select seeds on an empty graph");
  validate_weights(g, w);
  validate_costs(g, costs);
  const int k = bottom_k_size(epsilon, delta);
  const int r = instances > 0 ? instances : default_instance_count(k);

  const auto realizations = draw_instances(w, r, rng);
  const auto forward = build_adjacency(g, realizations, false);
  const auto reverse = build_adjacency(g, realizations, true);
  const auto ranked = draw_ranks(static_cast<std::size_t>(r) * n, rng);
  const std::size_t pairs = ranked.size();

  std::vector<std::uint8_t> covered(pairs, 0);
  std::vector<std::uint8_t> processed(pairs, 0);
  std::vector<std::vector<NodeId>> holders(pairs);
  std::vector<int> sketch_size(static_cast<std::size_t>(n), 0);
  std::vector<double> last_rank(static_cast<std::size_t>(n), 0.0);
  std::vector<std::uint8_t> selected(static_cast<std::size_t>(n), 0);
  std::vector<double> bonus_gain(static_cast<std::size_t>(n), 0.0);
  std::size_t covered_count = 0;

  SkimResult result;
  NodeSet current;
  double current_bonus = bonus ? bonus(current) : 0.0;

  auto refresh_bonus_gains = [&] {
    if (!bonus) return;
    for (NodeId i = 0; i < n; ++i)
      if (!selected[i]) bonus_gain[i] = bonus(with_node(current, i)) - current_bonus;
  };

  std::deque<NodeId> frontier;
  auto select = [&](NodeId u, double marginal_ratio) {
    selected[u] = 1;
    for (int q = 0; q < r; ++q) {
      const std::size_t base = static_cast<std::size_t>(q) * n;
      if (covered[base + u]) continue;
      covered[base + u] = 1;
      frontier.push_back(u);
      while (!frontier.empty()) {
        const NodeId x = frontier.front();
        frontier.pop_front();
        ++covered_count;
        if (processed[base + x])
          for (NodeId h : holders[base + x]) --sketch_size[h];
        for (NodeId y : forward.of(q, x, n)) {
          if (!covered[base + y]) {
            covered[base + y] = 1;
            frontier.push_back(y);
          }
        }
      }
    }
    current = with_node(current, u);
    if (bonus) current_bonus = bonus(current);
    result.order.push_back(u);
    result.marginal_ratio.push_back(marginal_ratio);
    result.prefix_spread.push_back(static_cast<double>(covered_count) / r);
    refresh_bonus_gains();
  };

  // Free nodes can only improve every ratio: take them first, lowest id first.
  for (NodeId i = 0; i < n; ++i)
    if (costs.node[i] == 0.0) select(i, std::numeric_limits<double>::infinity());

  // Rescale so that the cheapest remaining node has threshold exactly k.
  double min_cost = std::numeric_limits<double>::infinity();
  for (NodeId i = 0; i < n; ++i)
    if (!selected[i]) min_cost = std::min(min_cost, costs.node[i]);
  auto scaled_cost = [&](NodeId i) { return costs.node[i] / min_cost; };
  refresh_bonus_gains();

  auto threshold = [&](NodeId i) {
    return k * scaled_cost(i) - bonus_gain[i] * last_rank[i] * r;
  };

  std::vector<int> stamp(static_cast<std::size_t>(n), -1);
  int visit_id = 0;
  for (const RankedPair& rp : ranked) {
    if (result.order.size() == static_cast<std::size_t>(n)) break;
    if (covered[rp.pair]) continue;
    const int q = static_cast<int>(rp.pair / n);
    const NodeId v = static_cast<NodeId>(rp.pair % n);
    ++visit_id;
    stamp[v] = visit_id;
    frontier.push_back(v);
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop_front();
      // Every node reaching an uncovered pair is itself uncovered and unselected.
      ++sketch_size[u];
      last_rank[u] = rp.rank;
      holders[rp.pair].push_back(u);
      for (NodeId x : reverse.of(q, u, n)) {
        if (stamp[x] != visit_id) {
          stamp[x] = visit_id;
          frontier.push_back(x);
        }
      }
    }
    processed[rp.pair] = 1;

    for (;;) {
      NodeId pick = -1;
      for (NodeId i = 0; i < n && pick < 0; ++i)
        if (!selected[i] && sketch_size[i] > 0 && sketch_size[i] >= threshold(i)) pick = i;
      if (pick < 0) break;
      const double gain = sketch_size[pick] / (last_rank[pick] * r);
      select(pick, (gain + bonus_gain[pick]) / costs.node[pick]);
    }
  }

  // Ranks exhausted: residual sketches are now exact counts of uncovered pairs.
  while (result.order.size() < static_cast<std::size_t>(n)) {
    NodeId pick = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (NodeId i = 0; i < n; ++i) {
      if (selected[i]) continue;
      const double ratio = (static_cast<double>(sketch_size[i]) / r + bonus_gain[i]) / costs.node[i];
      if (ratio > best) {
        best = ratio;
        pick = i;
      }
    }
    select(pick, best);
  }

  double best_ratio = 0.0;  // S_0 = empty set has zero spread
  double cost = costs.fixed;
  NodeSet prefix;
  for (std::size_t j = 0; j < result.order.size(); ++j) {
    cost += costs.node[result.order[j]];
    prefix = with_node(prefix, result.order[j]);
    const double value = result.prefix_spread[j] + (bonus ? bonus(prefix) : 0.0);
    const double ratio = value / cost;
    if (ratio > best_ratio) {
      best_ratio = ratio;
      result.best_prefix = j + 1;
    }
  }
  result.seeds = make_node_set(
      std::vector<NodeId>(result.order.begin(), result.order.begin() + result.best_prefix));
  return result;
}

}  // namespace boim
