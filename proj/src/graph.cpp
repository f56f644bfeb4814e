#include "boim/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>

namespace boim {

namespace {

std::string edge_text(std::int64_t u, std::int64_t v) {
  return "(" + std::to_string(u) + ", " + std::to_string(v) + ")";
}

bool parse_label(std::string_view token, std::int64_t& out) {
  if (token.empty() || token.front() == '-' || token.front() == '+') return false;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

}  // namespace

DirectedGraph::DirectedGraph(NodeId node_count, std::vector<Edge> edges,
                             std::vector<std::int64_t> labels)
    : node_count_(node_count), edges_(std::move(edges)), labels_(std::move(labels)) {
  if (node_count_ < 0) throw ValidationError("negative node count");
  if (labels_.empty()) {
    labels_.resize(static_cast<std::size_t>(node_count_));
    std::iota(labels_.begin(), labels_.end(), std::int64_t{0});
  } else if (labels_.size() != static_cast<std::size_t>(node_count_)) {
    throw ValidationError("label count does not match node count");
  }

  degrees_ = Eigen::VectorXi::Zero(node_count_);
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const Edge& e : edges_) {
    if (e.source < 0 || e.source >= node_count_ || e.target < 0 || e.target >= node_count_)
      throw ValidationError("edge endpoint out of range: " + edge_text(e.source, e.target));
    if (e.source == e.target)
      throw ValidationError("self-loop on node " + std::to_string(labels_[e.source]));
    if (!seen.emplace(e.source, e.target).second)
      throw ValidationError("duplicate edge " +
                            edge_text(labels_[e.source], labels_[e.target]));
    ++degrees_[e.source];
  }

  offsets_.assign(static_cast<std::size_t>(node_count_) + 1, 0);
  for (NodeId i = 0; i < node_count_; ++i) offsets_[i + 1] = offsets_[i] + degrees_[i];
  arcs_.resize(edges_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId e = 0; e < edge_count(); ++e) {
    const Edge& edge = edges_[e];
    arcs_[cursor[edge.source]++] = OutArc{e, edge.target};
  }
}

DirectedGraph load_edge_list(std::istream& in) {
  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  std::vector<std::size_t> raw_lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    std::string a, b, extra;
    fields >> a >> b;
    if (b.empty()) throw ParseError(line_no, "expected two node ids, got '" + line + "'");
    if (fields >> extra) throw ParseError(line_no, "trailing token '" + extra + "'");
    std::int64_t u = 0, v = 0;
    if (!parse_label(a, u)) throw ParseError(line_no, "invalid node id '" + a + "'");
    if (!parse_label(b, v)) throw ParseError(line_no, "invalid node id '" + b + "'");
    raw.emplace_back(u, v);
    raw_lines.push_back(line_no);
  }

  std::map<std::int64_t, NodeId> index;
  for (auto [u, v] : raw) {
    index.emplace(u, 0);
    index.emplace(v, 0);
  }
  std::vector<std::int64_t> labels;
  labels.reserve(index.size());
  for (auto& [label, id] : index) {
    id = static_cast<NodeId>(labels.size());
    labels.push_back(label);
  }

  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    auto [u, v] = raw[k];
    if (u == v)
      throw ValidationError("line " + std::to_string(raw_lines[k]) + ": self-loop on node " +
                            std::to_string(u));
    if (!seen.emplace(u, v).second)
      throw ValidationError("line " + std::to_string(raw_lines[k]) + ": duplicate edge " +
                            edge_text(u, v));
    edges.push_back(Edge{index[u], index[v]});
  }
  const auto node_count = static_cast<NodeId>(labels.size());
  return DirectedGraph(node_count, std::move(edges), std::move(labels));
}

DirectedGraph load_edge_list_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list " + path.string());
  return load_edge_list(in);
}

void write_edge_list(const DirectedGraph& g, std::ostream& out) {
  for (const Edge& e : g.edges()) out << g.label(e.source) << ' ' << g.label(e.target) << '\n';
}

CostVector degree_proportional_costs(const DirectedGraph& g, double c0) {
  if (!(c0 > 0.0 && c0 <= 1.0)) throw ValidationError("fixed cost must lie in (0, 1]");
  const int max_degree = g.node_count() > 0 ? g.out_degrees().maxCoeff() : 0;
  if (max_degree == 0) throw ValidationError("degree-proportional costs need at least one edge");
  CostVector c;
  c.node = g.out_degrees().cast<double>() / static_cast<double>(max_degree);
  c.fixed = c0;
  return c;
}

void validate_weights(const DirectedGraph& g, const WeightVector& w) {
  if (w.size() != g.edge_count())
    throw ValidationError("weight vector has " + std::to_string(w.size()) + " entries, graph has " +
                          std::to_string(g.edge_count()) + " edges");
  if (w.size() > 0 && (w.minCoeff() < 0.0 || w.maxCoeff() > 1.0))
    throw ValidationError("edge weights must lie in [0, 1]");
}

void validate_costs(const DirectedGraph& g, const CostVector& c) {
  if (c.node.size() != g.node_count())
    throw ValidationError("cost vector size does not match node count");
  if (c.node.size() > 0 && (c.node.minCoeff() < 0.0 || c.node.maxCoeff() > 1.0))
    throw ValidationError("node costs must lie in [0, 1]");
  if (!(c.fixed > 0.0 && c.fixed <= 1.0)) throw ValidationError("fixed cost must lie in (0, 1]");
}

DirectedGraph complete_graph(NodeId n) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j)
      if (i != j) edges.push_back({i, j});
  return DirectedGraph(n, std::move(edges));
}

DirectedGraph path_graph(NodeId n) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return DirectedGraph(n, std::move(edges));
}

DirectedGraph star_graph(NodeId leaves) {
  std::vector<Edge> edges;
  for (NodeId j = 1; j <= leaves; ++j) edges.push_back({0, j});
  return DirectedGraph(leaves + 1, std::move(edges));
}

DirectedGraph random_graph(NodeId n, double density, Rng& rng) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j)
      if (i != j && uniform01(rng) < density) edges.push_back({i, j});
  return DirectedGraph(n, std::move(edges));
}

bool is_weakly_connected(const DirectedGraph& g) {
  const NodeId n = g.node_count();
  if (n <= 1) return true;
  std::vector<NodeId> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  NodeId components = n;
  for (const Edge& e : g.edges()) {
    NodeId a = find(e.source), b = find(e.target);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

bool operator==(const DirectedGraph& a, const DirectedGraph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  if (!std::equal(a.labels().begin(), a.labels().end(), b.labels().begin())) return false;
  for (EdgeId e = 0; e < a.edge_count(); ++e)
    if (a.edge(e).source != b.edge(e).source || a.edge(e).target != b.edge(e).target) return false;
  return true;
}

}  // namespace boim
