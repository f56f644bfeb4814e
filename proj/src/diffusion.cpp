#include "boim/diffusion.hpp"

#include <deque>
#include <string>

namespace boim {

void check_seed_range(const DirectedGraph& g, const NodeSet& seeds) {
  for (NodeId s : seeds)
    if (s < 0 || s >= g.node_count())
      throw std::out_of_range("node id " + std::to_string(s) + " out of range [0, " +
                              std::to_string(g.node_count()) + ")");
}

LiveEdges sample_realization(const WeightVector& w, Rng& rng) {
  LiveEdges live(w.size());
  for (Eigen::Index e = 0; e < w.size(); ++e) live[e] = uniform01(rng) < w[e] ? 1 : 0;
  return live;
}

namespace {

// Breadth-first from the seeds in ascending id order; fills `reached` flags.
void mark_reachable(const DirectedGraph& g, const LiveEdges& live, const NodeSet& seeds,
                    std::vector<std::uint8_t>& reached) {
  reached.assign(static_cast<std::size_t>(g.node_count()), 0);
  std::deque<NodeId> frontier;
  for (NodeId s : seeds) {
    if (!reached[s]) {
      reached[s] = 1;
      frontier.push_back(s);
    }
  }
  while (!frontier.empty()) {
    NodeId u = frontier.front();
    frontier.pop_front();
    for (const OutArc& arc : g.out_arcs(u)) {
      if (live[arc.edge] && !reached[arc.target]) {
        reached[arc.target] = 1;
        frontier.push_back(arc.target);
      }
    }
  }
}

void check_enumeration_guard(const DirectedGraph& g) {
  if (g.edge_count() > kMaxEnumeratedEdges)
    throw GuardError("exact enumeration supports at most " + std::to_string(kMaxEnumeratedEdges) +
                     " edges (graph has " + std::to_string(g.edge_count()) +
                     "); use the Monte-Carlo oracle instead");
}

}  // namespace

NodeSet reachable_set(const DirectedGraph& g, const LiveEdges& live, const NodeSet& seeds) {
  check_seed_range(g, seeds);
  std::vector<std::uint8_t> reached;
  mark_reachable(g, live, seeds, reached);
  NodeSet out;
  for (NodeId i = 0; i < g.node_count(); ++i)
    if (reached[i]) out.push_back(i);
  return out;
}

FeedbackRecord edge_level_feedback(const DirectedGraph& g, const LiveEdges& live,
                                   const NodeSet& seeds, const CostVector& realized_costs) {
  FeedbackRecord fb;
  fb.influenced = reachable_set(g, live, seeds);
  fb.realized_spread = static_cast<int>(fb.influenced.size());
  for (NodeId i : fb.influenced)
    for (const OutArc& arc : g.out_arcs(i)) fb.observed_edges.emplace_back(arc.edge, live[arc.edge]);
  std::sort(fb.observed_edges.begin(), fb.observed_edges.end());
  for (NodeId s : seeds) fb.seed_costs.emplace_back(s, realized_costs.node[s]);
  fb.fixed_cost = realized_costs.fixed;
  return fb;
}

void for_each_realization(const DirectedGraph& g, const WeightVector& w,
                          const std::function<void(const LiveEdges&, double)>& visit) {
  check_enumeration_guard(g);
  validate_weights(g, w);
  LiveEdges live(g.edge_count());
  std::vector<EdgeId> fractional;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    live[e] = w[e] >= 1.0 ? 1 : 0;
    if (w[e] > 0.0 && w[e] < 1.0) fractional.push_back(e);
  }
  std::function<void(std::size_t, double)> branch = [&](std::size_t k, double prob) {
    if (k == fractional.size()) {
      visit(live, prob);
      return;
    }
    const EdgeId e = fractional[k];
    live[e] = 1;
    branch(k + 1, prob * w[e]);
    live[e] = 0;
    branch(k + 1, prob * (1.0 - w[e]));
  };
  branch(0, 1.0);
}

Eigen::VectorXd exact_influence_probs(const DirectedGraph& g, const WeightVector& w,
                                      const NodeSet& seeds) {
  check_enumeration_guard(g);
  check_seed_range(g, seeds);
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(g.node_count());
  std::vector<std::uint8_t> reached;
  for_each_realization(g, w, [&](const LiveEdges& live, double prob) {
    mark_reachable(g, live, seeds, reached);
    for (NodeId i = 0; i < g.node_count(); ++i)
      if (reached[i]) probs[i] += prob;
  });
  for (NodeId s : seeds) probs[s] = 1.0;
  return probs;
}

double exact_spread(const DirectedGraph& g, const WeightVector& w, const NodeSet& seeds) {
  return exact_influence_probs(g, w, seeds).sum();
}

}  // namespace boim
