#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "boim/core.hpp"
#include "boim/rng.hpp"

namespace boim {

struct Edge {
  NodeId source;
  NodeId target;
};

struct OutArc {
  EdgeId edge;
  NodeId target;
};

/// Immutable directed network. Edge-ids follow construction order; each node's
/// out-arcs are stored in ascending edge-id order.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  /// Throws ValidationError on self-loops, duplicates or out-of-range endpoints.
  /// `labels` maps dense ids back to original node labels (identity if empty).
  DirectedGraph(NodeId node_count, std::vector<Edge> edges, std::vector<std::int64_t> labels = {});

  NodeId node_count() const noexcept { return node_count_; }
  EdgeId edge_count() const noexcept { return static_cast<EdgeId>(edges_.size()); }

  const Edge& edge(EdgeId e) const { return edges_.at(static_cast<std::size_t>(e)); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const OutArc> out_arcs(NodeId i) const {
    return {arcs_.data() + offsets_[i], arcs_.data() + offsets_[i + 1]};
  }
  int out_degree(NodeId i) const noexcept { return degrees_[i]; }
  const Eigen::VectorXi& out_degrees() const noexcept { return degrees_; }

  std::int64_t label(NodeId i) const { return labels_.at(static_cast<std::size_t>(i)); }
  std::span<const std::int64_t> labels() const noexcept { return labels_; }

 private:
  NodeId node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<OutArc> arcs_;
  Eigen::VectorXi degrees_;
  std::vector<std::int64_t> labels_;
};

/// SNAP-style edge list: one "u v" pair of non-negative integers per line,
/// '#' starts a comment line. Labels are densely re-indexed in numeric order.
DirectedGraph load_edge_list(std::istream& in);
DirectedGraph load_edge_list_file(const std::filesystem::path& path);

/// Writes original labels, one edge per line in edge-id order.
void write_edge_list(const DirectedGraph& g, std::ostream& out);

/// c_i = d_i / max_j d_j, fixed cost c0.
CostVector degree_proportional_costs(const DirectedGraph& g, double c0);

void validate_weights(const DirectedGraph& g, const WeightVector& w);
void validate_costs(const DirectedGraph& g, const CostVector& c);

DirectedGraph complete_graph(NodeId n);
DirectedGraph path_graph(NodeId n);
/// Node 0 points at nodes 1..leaves.
DirectedGraph star_graph(NodeId leaves);
/// Each ordered pair (i, j), i != j, is an edge independently with probability `density`.
DirectedGraph random_graph(NodeId n, double density, Rng& rng);

bool is_weakly_connected(const DirectedGraph& g);

bool operator==(const DirectedGraph& a, const DirectedGraph& b);

}  // namespace boim
