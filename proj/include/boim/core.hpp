#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace boim {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;

/// Seed sets are kept sorted ascending with no duplicates.
using NodeSet = std::vector<NodeId>;

/// Per-edge probabilities in [0,1], indexed by edge-id.
using WeightVector = Eigen::VectorXd;

/// Per-node costs plus the fixed per-round cost (the virtual index 0).
struct CostVector {
  Eigen::VectorXd node;
  double fixed = 1.0;

  /// c(S) + c0.
  double total(const NodeSet& seeds) const {
    double sum = 0.0;
    for (NodeId i : seeds) sum += node[i];
    return sum + fixed;
  }
};

/// Malformed input text; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Structurally invalid data (self-loops, duplicate edges, out-of-range values).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exact/enumeration routine was asked to work beyond its size guard.
class GuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline NodeSet make_node_set(std::vector<NodeId> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

inline bool contains(const NodeSet& set, NodeId i) {
  return std::binary_search(set.begin(), set.end(), i);
}

inline NodeSet with_node(NodeSet set, NodeId i) {
  auto it = std::lower_bound(set.begin(), set.end(), i);
  if (it == set.end() || *it != i) set.insert(it, i);
  return set;
}

/// Subset encoded by the low bits of `mask` (bit i <=> node i).
inline NodeSet node_set_from_mask(std::uint64_t mask) {
  NodeSet out;
  for (NodeId i = 0; mask != 0; ++i, mask >>= 1)
    if (mask & 1U) out.push_back(i);
  return out;
}

}  // namespace boim
