#include "boim/verify.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "boim/bonuses.hpp"
#include "boim/diffusion.hpp"
#include "boim/ratio_greedy.hpp"
#include "boim/sketch.hpp"
#include "boim/spread_oracle.hpp"

namespace boim {

namespace {

// Float rounding on both sides of an inequality that may hold with equality.
constexpr double kRounding = 1e-12;

constexpr int kSketchGraphs = 5;

class Tally {
 public:
  explicit Tally(std::string name) { result_.name = std::move(name); }

  void check(bool ok, const std::string& detail) {
    ++result_.checked;
    if (ok) return;
    if (result_.violations++ == 0) result_.first_violation = detail;
  }

  InvariantResult take() { return std::move(result_); }

 private:
  InvariantResult result_;
};

DirectedGraph small_graph(Rng& rng, NodeId min_nodes, NodeId max_nodes, EdgeId max_edges) {
  for (;;) {
    const NodeId n = min_nodes + static_cast<NodeId>(rng() % (max_nodes - min_nodes + 1));
    DirectedGraph g = random_graph(n, 0.2 + 0.5 * uniform01(rng), rng);
    if (g.edge_count() >= 1 && g.edge_count() <= max_edges) return g;
  }
}

WeightVector random_weights(const DirectedGraph& g, Rng& rng) {
  WeightVector w(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) w[e] = uniform01(rng);
  return w;
}

NodeSet random_nonempty_set(NodeId n, Rng& rng) {
  const std::uint64_t mask = 1 + rng() % ((std::uint64_t{1} << n) - 1);
  return node_set_from_mask(mask);
}

std::string describe(const NodeSet& s) {
  std::ostringstream out;
  out << '{';
  for (std::size_t k = 0; k < s.size(); ++k) out << (k ? "," : "") << s[k];
  out << '}';
  return out.str();
}

BonusContext random_context(const DirectedGraph& g, Rng& rng) {
  BonusContext ctx;
  ctx.node_count = g.node_count();
  ctx.edge_count = g.edge_count();
  const long round = 2 + static_cast<long>(rng() % 5000);
  ctx.radius = ellipsoid_radius(round, g.edge_count());
  ctx.scale = Eigen::ArrayXd::Zero(g.node_count());
  ctx.cost_counts = Eigen::VectorXi::Zero(g.node_count());
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const int count = uniform01(rng) < 0.2 ? 0 : 1 + static_cast<int>(rng() % 200);
    if (count > 0) ctx.scale[i] = ctx.radius * g.out_degree(i) / count;
    ctx.cost_counts[i] = static_cast<int>(rng() % 100);
  }
  return ctx;
}

InvariantResult smoothness_suite(const VerifyOptions& opt) {
  Tally tally("smoothness");
  Rng rng(derive_seed(opt.seed, 1));
  for (int k = 0; k < opt.instances; ++k) {
    const DirectedGraph g = small_graph(rng, 3, 6, 12);
    const WeightVector w = random_weights(g, rng);
    const WeightVector w2 = random_weights(g, rng);
    const NodeSet s = random_nonempty_set(g.node_count(), rng);
    const Eigen::VectorXd p = exact_influence_probs(g, w, s);
    const Eigen::VectorXd p2 = exact_influence_probs(g, w2, s);
    double bound = 0.0;
    for (EdgeId e = 0; e < g.edge_count(); ++e)
      bound += p[g.edge(e).source] * std::abs(w[e] - w2[e]);
    double worst = 0.0;
    for (NodeId i = 0; i < g.node_count(); ++i) worst = std::max(worst, std::abs(p[i] - p2[i]));
    tally.check(worst <= bound + kRounding,
                "instance " + std::to_string(k) + ": node deviation exceeds the weighted edge sum");
    tally.check(std::abs(p.sum() - p2.sum()) <= g.node_count() * bound + kRounding,
                "instance " + std::to_string(k) + ": spread deviation exceeds |V| times the sum");
  }
  return tally.take();
}

std::vector<InvariantResult> bonus_suite(const VerifyOptions& opt) {
  Tally chain1("bonus <= bonus1 <= |S| bonus");
  Tally chain2("bonus <= bonus2 <= sqrt|V| bonus");
  Tally chain3("bonus <= bonus3");
  Tally chain4("bonus4 <= bonus3");
  Rng rng(derive_seed(opt.seed, 2));
  for (int k = 0; k < opt.instances; ++k) {
    const DirectedGraph g = small_graph(rng, 3, 6, 10);
    const WeightVector w = random_weights(g, rng);
    const BonusContext ctx = random_context(g, rng);
    const NodeSet s = random_nonempty_set(g.node_count(), rng);
    const ExactOracle oracle(g, w);
    const Eigen::VectorXd p = oracle.influence_probs(s);
    Eigen::MatrixXd singles(g.node_count(), static_cast<Eigen::Index>(s.size()));
    for (std::size_t j = 0; j < s.size(); ++j)
      singles.col(static_cast<Eigen::Index>(j)) = oracle.influence_probs({s[j]});

    const double b = bonus(ctx, p);
    const double b1 = bonus1(ctx, singles);
    double b2 = bonus2(ctx, p);
    if (opt.fault == Fault::NegatedBonus) b2 = -b2;
    const double b3 = bonus3(ctx, p);
    const double b4 = bonus4(ctx, s, oracle);
    const double tol = kRounding * std::max(1.0, b3);
    const std::string where = "instance " + std::to_string(k) + " S=" + describe(s);
    chain1.check(b <= b1 + tol && b1 <= s.size() * b + tol, where);
    chain2.check(b <= b2 + tol && b2 <= std::sqrt(static_cast<double>(g.node_count())) * b + tol,
                 where);
    chain3.check(b <= b3 + tol, where);
    chain4.check(b4 <= b3 + tol, where);
  }
  return {chain1.take(), chain2.take(), chain3.take(), chain4.take()};
}

InvariantResult greedy_suite(const VerifyOptions& opt) {
  Tally tally("greedy ratio >= (1-1/e) optimum");
  Rng rng(derive_seed(opt.seed, 3));
  const double factor = 1.0 - 1.0 / std::numbers::e;
  for (int k = 0; k < opt.instances; ++k) {
    const DirectedGraph g = small_graph(rng, 2, 5, 14);
    const WeightVector w = random_weights(g, rng);
    CostVector c;
    c.node.resize(g.node_count());
    for (NodeId i = 0; i < g.node_count(); ++i) c.node[i] = uniform_open01(rng);
    c.fixed = uniform_open01(rng);
    const ExactOracle oracle(g, w);
    const SetFunction f = [&oracle](const NodeSet& s) { return oracle.spread(s); };
    const NodeSet chosen = lazy_greedy_ratio(f, c);
    const double ratio = f(chosen) / c.total(chosen);
    const RatioOptimum best = brute_force_ratio(g, w, c);
    tally.check(ratio >= factor * best.ratio - kRounding,
                "instance " + std::to_string(k) + ": ratio " + std::to_string(ratio) +
                    " vs optimum " + std::to_string(best.ratio));
  }
  return tally.take();
}

InvariantResult sketch_suite(const VerifyOptions& opt) {
  Tally tally("sketch relative error <= eps w.p. >= 1 - delta - 0.02");
  Rng rng(derive_seed(opt.seed, 4));
  const double eps = 0.2, delta = 0.05;
  const int k = bottom_k_size(eps, delta);
  struct Case {
    DirectedGraph g;
    WeightVector w;
    NodeSet seeds;
    double truth;
  };
  std::vector<Case> corpus;
  for (int index = 0; index < kSketchGraphs; ++index) {
    DirectedGraph g = small_graph(rng, 4, 8, 15);
    WeightVector w = random_weights(g, rng);
    NodeSet s = random_nonempty_set(g.node_count(), rng);
    const double truth = exact_spread(g, w, s);
    corpus.push_back({std::move(g), std::move(w), std::move(s), truth});
  }
  // Rebuilds cycle through the corpus; coverage is pooled over all of them.
  int within = 0;
  for (int b = 0; b < opt.sketch_rebuilds; ++b) {
    const Case& c = corpus[static_cast<std::size_t>(b % kSketchGraphs)];
    const SketchSet sk = build_sketches(c.g, c.w, k, default_instance_count(k), rng);
    within += std::abs(sketch_spread_estimate(sk, c.seeds) - c.truth) <= eps * c.truth;
  }
  const double rate = static_cast<double>(within) / opt.sketch_rebuilds;
  tally.check(rate >= 1.0 - delta - 0.02,
              "coverage " + std::to_string(rate) + " over " + std::to_string(opt.sketch_rebuilds) +
                  " rebuilds");
  return tally.take();
}

}  // namespace

Fault parse_fault(const std::string& text) {
  if (text.empty() || text == "none") return Fault::None;
  if (text == "negated-bonus") return Fault::NegatedBonus;
  throw std::invalid_argument("unknown fault '" + text + "' (expected negated-bonus)");
}

std::vector<InvariantResult> run_property_suites(const VerifyOptions& options) {
  std::vector<InvariantResult> out;
  out.push_back(smoothness_suite(options));
  for (auto& r : bonus_suite(options)) out.push_back(std::move(r));
  out.push_back(greedy_suite(options));
  out.push_back(sketch_suite(options));
  return out;
}

bool print_verify_report(std::ostream& out, const std::vector<InvariantResult>& results) {
  bool ok = true;
  for (const auto& r : results) {
    out << (r.passed() ? "PASS " : "FAIL ") << r.name << "  (" << r.checked << " checks, "
        << r.violations << " violations)";
    if (!r.passed()) out << "  first: " << r.first_violation;
    out << '\n';
    ok = ok && r.passed();
  }
  return ok;
}

}  // namespace boim
