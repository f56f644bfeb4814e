#include "boim/estimation.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace boim {

BanditState::BanditState(const DirectedGraph& g, double budget)
    : initial_budget_(budget),
      weight_counts_(Eigen::VectorXi::Zero(g.node_count())),
      edge_sums_(Eigen::VectorXd::Zero(g.edge_count())),
      cost_counts_(Eigen::VectorXi::Zero(g.node_count())),
      cost_sums_(Eigen::VectorXd::Zero(g.node_count())) {}

void BanditState::check_costs(const NodeSet& seeds, const FeedbackRecord& fb) const {
  if (fb.seed_costs.size() != seeds.size())
    throw ValidationError("feedback costs do not cover the seed set");
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const auto& [node, cost] = fb.seed_costs[k];
    if (node != seeds[k]) throw ValidationError("feedback cost for a node outside the seed set");
    if (!(cost >= 0.0 && cost <= 1.0)) throw ValidationError("realized cost outside [0, 1]");
  }
  if (!(fb.fixed_cost >= 0.0 && fb.fixed_cost <= 1.0))
    throw ValidationError("realized fixed cost outside [0, 1]");
}

void BanditState::record_costs(const FeedbackRecord& fb) {
  for (const auto& [node, cost] : fb.seed_costs) {
    ++cost_counts_[node];
    cost_sums_[node] += cost;
  }
  ++fixed_cost_count_;
  fixed_cost_sum_ += fb.fixed_cost;
  spent_ += fb.paid();
  ++round_;
}

void BanditState::update(const DirectedGraph& g, const NodeSet& seeds, const FeedbackRecord& fb) {
  check_costs(seeds, fb);
  for (NodeId s : seeds)
    if (!contains(fb.influenced, s)) throw ValidationError("seed missing from influenced set");
  if (fb.realized_spread != static_cast<int>(fb.influenced.size()))
    throw ValidationError("realized spread does not match the influenced set");

  std::size_t expected_edges = 0;
  for (NodeId i : fb.influenced) {
    if (i < 0 || i >= g.node_count()) throw ValidationError("influenced node out of range");
    expected_edges += static_cast<std::size_t>(g.out_degree(i));
  }
  if (fb.observed_edges.size() != expected_edges)
    throw ValidationError("observed edges are not exactly the out-edges of influenced nodes");
  for (const auto& [edge, value] : fb.observed_edges) {
    if (edge < 0 || edge >= g.edge_count() || !contains(fb.influenced, g.edge(edge).source))
      throw ValidationError("observed edge whose source was not influenced");
    if (value > 1) throw ValidationError("edge observation must be 0 or 1");
  }

  for (NodeId i : fb.influenced) ++weight_counts_[i];
  for (const auto& [edge, value] : fb.observed_edges) edge_sums_[edge] += value;
  record_costs(fb);
}

void BanditState::update_costs_only(const NodeSet& seeds, const FeedbackRecord& fb) {
  check_costs(seeds, fb);
  record_costs(fb);
}

namespace {

constexpr const char* kStateHeader = "boim-bandit-state";
constexpr int kStateVersion = 1;

template <typename Vec>
void write_vector(std::ostream& out, const char* key, const Vec& v) {
  out << key << ' ' << v.size();
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v[i];
  out << '\n';
}

template <typename Vec>
Vec parse_vector(const std::string& text) {
  std::istringstream in(text);
  Eigen::Index size = 0;
  in >> size;
  Vec v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    std::string token;
    if (!(in >> token)) throw ValidationError("truncated vector in bandit state");
    if constexpr (std::is_same_v<typename Vec::Scalar, double>)
      v[i] = std::stod(token);
    else
      v[i] = std::stoi(token);
  }
  return v;
}

}  // namespace

void BanditState::write(std::ostream& out) const {
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << kStateHeader << ' ' << kStateVersion << '\n';
  out << "round " << round_ << '\n';
  out << "initial_budget " << initial_budget_ << '\n';
  out << "spent " << spent_ << '\n';
  out << "fixed_cost_count " << fixed_cost_count_ << '\n';
  out << "fixed_cost_sum " << fixed_cost_sum_ << '\n';
  write_vector(out, "weight_counts", weight_counts_);
  write_vector(out, "edge_sums", edge_sums_);
  write_vector(out, "cost_counts", cost_counts_);
  write_vector(out, "cost_sums", cost_sums_);
  out.precision(precision);
}

BanditState BanditState::read(std::istream& in) {
  std::string header;
  int version = 0;
  if (!(in >> header >> version) || header != kStateHeader)
    throw ValidationError("not a bandit state file");
  if (version != kStateVersion)
    throw ValidationError("unsupported bandit state version " + std::to_string(version));
  std::map<std::string, std::string> fields;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto space = line.find(' ');
    fields[line.substr(0, space)] = space == std::string::npos ? "" : line.substr(space + 1);
  }
  auto field = [&](const char* key) -> const std::string& {
    auto it = fields.find(key);
    if (it == fields.end()) throw ValidationError(std::string("bandit state missing ") + key);
    return it->second;
  };
  BanditState s;
  s.round_ = std::stol(field("round"));
  s.initial_budget_ = std::stod(field("initial_budget"));
  s.spent_ = std::stod(field("spent"));
  s.fixed_cost_count_ = std::stol(field("fixed_cost_count"));
  s.fixed_cost_sum_ = std::stod(field("fixed_cost_sum"));
  s.weight_counts_ = parse_vector<Eigen::VectorXi>(field("weight_counts"));
  s.edge_sums_ = parse_vector<Eigen::VectorXd>(field("edge_sums"));
  s.cost_counts_ = parse_vector<Eigen::VectorXi>(field("cost_counts"));
  s.cost_sums_ = parse_vector<Eigen::VectorXd>(field("cost_sums"));
  return s;
}

namespace {

template <typename Vec>
bool same(const Vec& a, const Vec& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

}  // namespace

bool operator==(const BanditState& a, const BanditState& b) {
  return a.round_ == b.round_ && a.initial_budget_ == b.initial_budget_ && a.spent_ == b.spent_ &&
         a.fixed_cost_count_ == b.fixed_cost_count_ && a.fixed_cost_sum_ == b.fixed_cost_sum_ &&
         same(a.weight_counts_, b.weight_counts_) && same(a.edge_sums_, b.edge_sums_) &&
         same(a.cost_counts_, b.cost_counts_) && same(a.cost_sums_, b.cost_sums_);
}

WeightVector mean_weights(const BanditState& state, const DirectedGraph& g) {
  WeightVector mean(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const int count = state.weight_counts()[g.edge(e).source];
    mean[e] = count == 0 ? 1.0 : state.edge_sums()[e] / count;
  }
  return mean;
}

WeightVector weight_ucb(const BanditState& state, const DirectedGraph& g) {
  const double log_t = std::log(static_cast<double>(state.round()));
  WeightVector ucb(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const int count = state.weight_counts()[g.edge(e).source];
    ucb[e] = count == 0 ? 1.0
                        : std::min(1.0, state.edge_sums()[e] / count + std::sqrt(1.5 * log_t / count));
  }
  return ucb;
}

CostVector cost_lcb(const BanditState& state) {
  const double log_t = std::log(static_cast<double>(state.round()));
  auto lcb = [log_t](double sum, long count) {
    if (count == 0) return 0.0;
    const double n = static_cast<double>(count);
    return std::max(0.0, sum / n - std::sqrt(1.5 * log_t / n));
  };
  CostVector c;
  c.node.resize(state.cost_counts().size());
  for (Eigen::Index i = 0; i < c.node.size(); ++i)
    c.node[i] = lcb(state.cost_sums()[i], state.cost_counts()[i]);
  c.fixed = lcb(state.fixed_cost_sum(), state.fixed_cost_count());
  return c;
}

double ellipsoid_radius(long round, EdgeId edge_count) {
  const double t = static_cast<double>(std::max(round, 3L));
  return 2.0 * std::log(t) + 2.0 * (edge_count + 2.0) * std::log(std::log(t)) + 1.0;
}

bool ellipsoid_contains(const BanditState& state, const DirectedGraph& g, const WeightVector& w) {
  double deviation = 0.0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const int count = state.weight_counts()[g.edge(e).source];
    if (count == 0) continue;
    const double diff = w[e] - state.edge_sums()[e] / count;
    deviation += count * diff * diff;
  }
  return deviation <= ellipsoid_radius(state.round(), g.edge_count());
}

}  // namespace boim
