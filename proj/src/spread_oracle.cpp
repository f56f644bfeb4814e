#include "boim/spread_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>

namespace boim {
namespace detail {

void RealizationTable::reserve(std::size_t draws) {
  weights_.reserve(draws);
  if (uses_masks())
    masks_.reserve(draws * static_cast<std::size_t>(graph_->node_count()));
}

void RealizationTable::add(const LiveEdges& live, double weight) {
  const DirectedGraph& g = *graph_;
  if (uses_masks()) {
    std::uint64_t adjacency[64] = {};
    for (EdgeId e = 0; e < g.edge_count(); ++e)
      if (live[e]) adjacency[g.edge(e).source] |= std::uint64_t{1} << g.edge(e).target;
    add_adjacency(adjacency, weight);
  } else {
    weights_.push_back(weight);
    words_per_draw_ = (static_cast<std::size_t>(g.edge_count()) + 63) / 64;
    const std::size_t base = live_bits_.size();
    live_bits_.resize(base + words_per_draw_, 0);
    for (EdgeId e = 0; e < g.edge_count(); ++e)
      if (live[e]) live_bits_[base + e / 64] |= std::uint64_t{1} << (e % 64);
  }
}

void RealizationTable::add_adjacency(const std::uint64_t* adjacency, double weight) {
  const NodeId n = graph_->node_count();
  weights_.push_back(weight);
  {
    for (NodeId s = 0; s < n; ++s) {
      std::uint64_t reach = std::uint64_t{1} << s;
      std::uint64_t frontier = reach;
      while (frontier != 0) {
        const int u = std::countr_zero(frontier);
        frontier &= frontier - 1;
        const std::uint64_t fresh = adjacency[u] & ~reach;
        reach |= fresh;
        frontier |= fresh;
      }
      masks_.push_back(reach);
    }
  }
}

std::uint64_t RealizationTable::reach_mask(std::size_t draw, const NodeSet& seeds) const {
  const std::uint64_t* row = masks_.data() + draw * static_cast<std::size_t>(graph_->node_count());
  std::uint64_t mask = 0;
  for (NodeId s : seeds) mask |= row[s];
  return mask;
}

void RealizationTable::for_each_reach(
    const NodeSet& seeds,
    const std::function<void(std::size_t, double, const std::uint8_t*)>& visit) const {
  const DirectedGraph& g = *graph_;
  const NodeId n = g.node_count();
  std::vector<std::uint8_t> reached(static_cast<std::size_t>(n));
  if (uses_masks()) {
    for (std::size_t q = 0; q < weights_.size(); ++q) {
      const std::uint64_t mask = reach_mask(q, seeds);
      for (NodeId i = 0; i < n; ++i) reached[i] = (mask >> i) & 1U;
      visit(q, weights_[q], reached.data());
    }
    return;
  }
  std::deque<NodeId> frontier;
  for (std::size_t q = 0; q < weights_.size(); ++q) {
    const std::uint64_t* bits = live_bits_.data() + q * words_per_draw_;
    std::fill(reached.begin(), reached.end(), 0);
    for (NodeId s : seeds) {
      if (!reached[s]) {
        reached[s] = 1;
        frontier.push_back(s);
      }
    }
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop_front();
      for (const OutArc& arc : g.out_arcs(u)) {
        if (((bits[arc.edge / 64] >> (arc.edge % 64)) & 1U) && !reached[arc.target]) {
          reached[arc.target] = 1;
          frontier.push_back(arc.target);
        }
      }
    }
    visit(q, weights_[q], reached.data());
  }
}

double RealizationTable::spread(const NodeSet& seeds) const {
  // Summing the marginals keeps spread() and influence_probs() consistent to the bit.
  return influence_probs(seeds).sum();
}

Estimate RealizationTable::spread_estimate(const NodeSet& seeds) const {
  // Sample mean and standard error; meaningful when draws are equally weighted.
  const NodeId n = graph_->node_count();
  const double count = static_cast<double>(weights_.size());
  double sum = 0.0, sum_sq = 0.0;
  for_each_reach(seeds, [&](std::size_t, double, const std::uint8_t* reached) {
    double size = 0.0;
    for (NodeId i = 0; i < n; ++i) size += reached[i];
    sum += size;
    sum_sq += size * size;
  });
  Estimate est;
  est.mean = sum / count;
  if (count > 1) {
    const double var = std::max(0.0, (sum_sq - count * est.mean * est.mean) / (count - 1));
    est.std_error = std::sqrt(var / count);
  }
  return est;
}

Eigen::VectorXd RealizationTable::influence_probs(const NodeSet& seeds) const {
  const NodeId n = graph_->node_count();
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(n);
  if (seeds.empty()) return probs;
  if (uses_masks()) {
    for (std::size_t q = 0; q < weights_.size(); ++q) {
      std::uint64_t mask = reach_mask(q, seeds);
      while (mask != 0) {
        probs[std::countr_zero(mask)] += weights_[q];
        mask &= mask - 1;
      }
    }
  } else {
    for_each_reach(seeds, [&](std::size_t, double wt, const std::uint8_t* reached) {
      for (NodeId i = 0; i < n; ++i)
        if (reached[i]) probs[i] += wt;
    });
  }
  for (NodeId s : seeds) probs[s] = 1.0;
  return probs;
}

double RealizationTable::reach_functional(const NodeSet& seeds, const Eigen::VectorXd& node_values,
                                          const std::function<double(double)>& outer) const {
  const NodeId n = graph_->node_count();
  double total = 0.0;
  if (uses_masks()) {
    for (std::size_t q = 0; q < weights_.size(); ++q) {
      std::uint64_t mask = seeds.empty() ? 0 : reach_mask(q, seeds);
      double inner = 0.0;
      while (mask != 0) {
        inner += node_values[std::countr_zero(mask)];
        mask &= mask - 1;
      }
      total += weights_[q] * outer(inner);
    }
    return total;
  }
  for_each_reach(seeds, [&](std::size_t, double wt, const std::uint8_t* reached) {
    double inner = 0.0;
    for (NodeId i = 0; i < n; ++i)
      if (reached[i]) inner += node_values[i];
    total += wt * outer(inner);
  });
  return total;
}

}  // namespace detail

namespace {

// Tabulate when the table stays under ~64 MiB.
constexpr std::size_t kMaxTabulatedWords = std::size_t{1} << 23;

}  // namespace

ExactOracle::ExactOracle(const DirectedGraph& g, WeightVector w) : graph_(&g), weights_(std::move(w)) {
  if (g.edge_count() > kMaxEnumeratedEdges)
    throw GuardError("exact oracle supports at most " + std::to_string(kMaxEnumeratedEdges) +
                     " edges (graph has " + std::to_string(g.edge_count()) +
                     "); use the Monte-Carlo oracle instead");
  validate_weights(g, weights_);
  const auto fractional =
      (weights_.array() > 0.0 && weights_.array() < 1.0).cast<int>().sum();
  const std::size_t draws = std::size_t{1} << fractional;
  if (g.node_count() <= 64 && draws * static_cast<std::size_t>(std::max(1, g.node_count())) <=
                                  kMaxTabulatedWords) {
    table_ = std::make_unique<detail::RealizationTable>(g);
    table_->reserve(draws);
    for_each_realization(g, weights_, [&](const LiveEdges& live, double prob) {
      table_->add(live, prob);
    });
  }
}

double ExactOracle::spread(const NodeSet& seeds) const {
  check_seed_range(*graph_, seeds);
  if (table_) return table_->spread(seeds);
  return exact_spread(*graph_, weights_, seeds);
}

Eigen::VectorXd ExactOracle::influence_probs(const NodeSet& seeds) const {
  check_seed_range(*graph_, seeds);
  if (table_) return table_->influence_probs(seeds);
  return exact_influence_probs(*graph_, weights_, seeds);
}

double ExactOracle::reach_functional(const NodeSet& seeds, const Eigen::VectorXd& node_values,
                                     const std::function<double(double)>& outer) const {
  check_seed_range(*graph_, seeds);
  if (table_) return table_->reach_functional(seeds, node_values, outer);
  double total = 0.0;
  for_each_realization(*graph_, weights_, [&](const LiveEdges& live, double prob) {
    double inner = 0.0;
    for (NodeId i : reachable_set(*graph_, live, seeds)) inner += node_values[i];
    total += prob * outer(inner);
  });
  return total;
}

std::vector<double> detail::RealizationTable::all_subset_spreads() const {
  const NodeId n = graph_->node_count();
  if (n > 20) throw GuardError("subset enumeration supports at most 20 nodes");
  const std::size_t subsets = std::size_t{1} << n;
  std::vector<double> spreads(subsets, 0.0);
  std::vector<std::uint64_t> unions(subsets, 0);
  for (std::size_t q = 0; q < size(); ++q) {
    const double wt = weight(q);
    for (std::size_t mask = 1; mask < subsets; ++mask) {
      const int low = std::countr_zero(mask);
      unions[mask] = unions[mask & (mask - 1)] | reach_mask(q, static_cast<NodeId>(low));
      spreads[mask] += wt * std::popcount(unions[mask]);
    }
  }
  return spreads;
}

std::vector<double> ExactOracle::all_subset_spreads() const {
  const NodeId n = graph_->node_count();
  if (n > 20) throw GuardError("subset enumeration supports at most 20 nodes");
  if (table_) return table_->all_subset_spreads();
  const std::size_t subsets = std::size_t{1} << n;
  std::vector<double> spreads(subsets, 0.0);
  for (std::size_t mask = 1; mask < subsets; ++mask) spreads[mask] = spread(node_set_from_mask(mask));
  return spreads;
}

std::vector<double> MonteCarloOracle::all_subset_spreads() const {
  return table_.all_subset_spreads();
}

MonteCarloOracle::MonteCarloOracle(const DirectedGraph& g, WeightVector w, std::size_t replicates,
                                   std::uint64_t seed)
    : graph_(&g), table_(g) {
  if (replicates == 0) throw ValidationError("Monte-Carlo oracle needs at least one replicate");
  validate_weights(g, w);
  table_.reserve(replicates);
  const double weight = 1.0 / static_cast<double>(replicates);
  if (!table_.uses_masks()) {
    for (std::size_t r = 0; r < replicates; ++r) {
      Rng stream(derive_seed(seed, r));
      table_.add(sample_realization(w, stream), weight);
    }
    return;
  }
  // Same draws as sample_realization: uniform01 < w  <=>  (x >> 11) < ceil(w 2^53).
  std::vector<std::uint64_t> threshold(static_cast<std::size_t>(g.edge_count()));
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    threshold[e] = static_cast<std::uint64_t>(std::ceil(std::ldexp(w[e], 53)));
  std::uint64_t adjacency[64];
  for (std::size_t r = 0; r < replicates; ++r) {
    Rng stream(derive_seed(seed, r));
    std::fill(std::begin(adjacency), std::end(adjacency), 0);
    for (EdgeId e = 0; e < g.edge_count(); ++e)
      if ((stream() >> 11) < threshold[e])
        adjacency[g.edge(e).source] |= std::uint64_t{1} << g.edge(e).target;
    table_.add_adjacency(adjacency, weight);
  }
}

double MonteCarloOracle::spread(const NodeSet& seeds) const {
  check_seed_range(*graph_, seeds);
  return table_.spread(seeds);
}

Estimate MonteCarloOracle::spread_estimate(const NodeSet& seeds) const {
  check_seed_range(*graph_, seeds);
  return table_.spread_estimate(seeds);
}

Eigen::VectorXd MonteCarloOracle::influence_probs(const NodeSet& seeds) const {
  check_seed_range(*graph_, seeds);
  return table_.influence_probs(seeds);
}

double MonteCarloOracle::reach_functional(const NodeSet& seeds, const Eigen::VectorXd& node_values,
                                          const std::function<double(double)>& outer) const {
  check_seed_range(*graph_, seeds);
  return table_.reach_functional(seeds, node_values, outer);
}

std::size_t McSchedule::replicates(long round, NodeId node_count) const {
  const double scheduled = std::ceil(std::max(
      static_cast<double>(min_replicates),
      static_cast<double>(node_count) * std::log(static_cast<double>(round) + 3.0) /
          (epsilon * epsilon)));
  auto n = static_cast<std::size_t>(scheduled);
  if (max_replicates > 0) n = std::min(n, max_replicates);
  return std::max<std::size_t>(n, 1);
}

}  // namespace boim
