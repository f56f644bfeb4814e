#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "boim/evaluation.hpp"
#include "oracles.hpp"

using namespace boim;

namespace {

const double kInvE = 1.0 / std::exp(1.0);

RoundLog round_of(long t, NodeSet seeds, double paid) {
  RoundLog r;
  r.t = t;
  r.seeds = std::move(seeds);
  r.paid = paid;
  return r;
}

}  // namespace

TEST_CASE("lambda* on a single node") {
  const DirectedGraph g(1, {});
  const CostVector c{Eigen::VectorXd::Constant(1, 0.5), 1.0};
  const LambdaStar l = lambda_star(g, WeightVector(), c);
  CHECK(l.value == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(l.set == NodeSet{0});
  CHECK(l.provenance == Provenance::Exact);
  CHECK(to_string(Provenance::EnumeratedMc) == "enumerated-mc");
}

TEST_CASE("lambda* matches brute force and the reference enumeration") {
  const DirectedGraph path = path_graph(3);
  const WeightVector half = WeightVector::Constant(2, 0.5);
  const CostVector c{Eigen::Vector3d::Constant(0.2), 1.0};
  const LambdaStar l = lambda_star(path, half, c);
  const RatioOptimum b = brute_force_ratio(path, half, c);
  CHECK(l.value == b.ratio);
  CHECK(l.set == b.set);

  Rng rng(1);
  for (int k = 0; k < 20; ++k) {
    const DirectedGraph g = oracle::random_small_graph(5, 10, rng);
    const WeightVector w = oracle::random_weights(g, rng);
    const CostVector cost = oracle::random_costs(5, rng);
    const oracle::Best best = oracle::best_ratio(oracle::all_spreads(g, w), cost);
    const LambdaStar got = lambda_star(g, w, cost);
    CHECK(got.value == doctest::Approx(best.ratio).epsilon(1e-12));
    CHECK(got.set == oracle::set_of(best.mask));
  }
}

TEST_CASE("lambda* provenance follows the size guards") {
  Rng rng(2);
  const DirectedGraph dense = complete_graph(6);  // 30 edges: too many to enumerate realizations
  const WeightVector w = WeightVector::Constant(30, 0.05);
  TruthOptions opts;
  opts.replicates = 2000;
  CHECK(lambda_star(dense, w, degree_proportional_costs(dense, 1.0), opts).provenance ==
        Provenance::EnumeratedMc);
  const DirectedGraph big = random_graph(40, 0.05, rng);
  const LambdaStar approx =
      lambda_star(big, oracle::random_weights(big, rng), degree_proportional_costs(big, 1.0), opts);
  CHECK(approx.provenance == Provenance::Approximate);
  CHECK(approx.value > 0.0);
}

TEST_CASE("lambda* under a per-round budget includes boundary mixtures") {
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const DirectedGraph g = oracle::random_small_graph(5, 10, rng);
    const WeightVector w = oracle::random_weights(g, rng);
    const CostVector c = oracle::random_costs(5, rng);
    TruthOptions opts;
    opts.round_budget = c.fixed + 0.4 * c.node.sum();
    const LambdaStar l = lambda_star(g, w, c, opts);
    CHECK(l.value == doctest::Approx(oracle::knapsack_optimum(oracle::all_spreads(g, w), c,
                                                              *opts.round_budget))
                         .epsilon(1e-10));
  }
  const DirectedGraph g = path_graph(2);
  TruthOptions low;
  low.round_budget = 0.5;
  CHECK_THROWS_AS(lambda_star(g, WeightVector::Ones(1), CostVector{Eigen::Vector2d(0.1, 0.1), 1.0}, low),
                  ValidationError);
}

TEST_CASE("gap closed forms") {
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const DirectedGraph g = oracle::random_small_graph(5, 10, rng);
    const WeightVector w = oracle::random_weights(g, rng);
    const CostVector c = oracle::random_costs(5, rng);
    const LambdaStar l = lambda_star(g, w, c);
    const double sigma_star = oracle::spread(g, w, l.set);
    CHECK(gap(g, w, c, l.value, 0.0, l.set) == doctest::Approx(-kInvE * sigma_star).epsilon(1e-10));
    CHECK(gap(g, w, c, l.value, 0.1, {}) == doctest::Approx((1.0 - kInvE - 0.1) * l.value * c.fixed).epsilon(1e-12));
    CHECK(gap(g, w, c, l.value, 0.1, {}) >= 0.0);

    // For a set with ratio r, the gap changes sign at eps = 1 - 1/e - r / lambda*.
    const NodeSet s{static_cast<NodeId>(k % 5)};
    const double r = oracle::spread(g, w, s) / c.total(s);
    const double flip = 1.0 - kInvE - r / l.value;
    CHECK(gap(g, w, c, l.value, flip - 0.01, s) > 0.0);
    CHECK(gap(g, w, c, l.value, flip + 0.01, s) < 0.0);

    const GapEvaluator eval(g, w, c, 0.0);
    CHECK(eval.gap(l.set) <= 1e-12);
    CHECK(eval.gap(s) == doctest::Approx(gap(g, w, c, l.value, 0.0, s)).epsilon(1e-12));
    CHECK(eval.gap_std_error(s) == 0.0);
  }
}

TEST_CASE("exact and Monte-Carlo gaps agree within 4 standard errors") {
  Rng rng(5);
  for (int k = 0; k < 10; ++k) {
    const DirectedGraph g = oracle::random_small_graph(6, 12, rng);
    const WeightVector w = oracle::random_weights(g, rng);
    const CostVector c = oracle::random_costs(6, rng);
    const GapEvaluator eval(g, w, c, 0.1);
    const MonteCarloOracle mc(g, w, 20000, 50 + k);
    const NodeSet s{static_cast<NodeId>(k % 6), static_cast<NodeId>((k + 3) % 6)};
    const Estimate e = mc.spread_estimate(s);
    const double mc_gap = eval.factor() * eval.lambda_star().value * c.total(s) - e.mean;
    CHECK(std::abs(mc_gap - eval.gap(s)) <= 4.0 * e.std_error + 1e-12);
  }
}

TEST_CASE("Monte-Carlo gap evaluator reports standard errors") {
  const DirectedGraph g = complete_graph(6);
  TruthOptions opts;
  opts.replicates = 3000;
  const GapEvaluator eval(g, WeightVector::Constant(30, 0.2), degree_proportional_costs(g, 1.0), 0.1, opts);
  CHECK(eval.gap_std_error({0}) > 0.0);
  CHECK(eval.spread({0}).mean == eval.spread({0}).mean);
}

TEST_CASE("regret curve") {
  EpisodeTrace empty;
  CHECK(regret_curve(empty, {}).empty());

  // Always playing the same set: slope is gap per unit cost.
  EpisodeTrace trace;
  for (long t = 1; t <= 5; ++t) trace.rounds.push_back(round_of(t, {0}, 2.0));
  trace.exhausted = true;
  const std::vector<double> gaps(4, -0.5);
  const auto curve = regret_curve(trace, gaps);
  REQUIRE(curve.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(curve[k].budget_consumed == 2.0 * (k + 1));
    CHECK(curve[k].cumulative_gap == -0.5 * (k + 1));
  }
  CHECK_THROWS_AS(regret_curve(trace, std::vector<double>(5, 0.0)), ValidationError);

  // Left-continuous step function at checkpoints.
  const auto at = curve_at(curve, {1.0, 2.0, 3.9, 8.0, 100.0});
  CHECK(at == std::vector<double>{0.0, -0.5, -0.5, -2.0, -2.0});
}

TEST_CASE("concatenated traces sum their curves") {
  Rng rng(6);
  EpisodeTrace a, b, ab;
  std::vector<double> ga, gb;
  for (long t = 1; t <= 6; ++t) {
    a.rounds.push_back(round_of(t, {}, uniform01(rng)));
    ga.push_back(uniform01(rng) - 0.5);
    b.rounds.push_back(round_of(t, {}, uniform01(rng)));
    gb.push_back(uniform01(rng) - 0.5);
  }
  ab.rounds = a.rounds;
  ab.rounds.insert(ab.rounds.end(), b.rounds.begin(), b.rounds.end());
  std::vector<double> gab = ga;
  gab.insert(gab.end(), gb.begin(), gb.end());
  const auto ca = regret_curve(a, ga), cb = regret_curve(b, gb), cab = regret_curve(ab, gab);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(cab[6 + k].cumulative_gap == doctest::Approx(ca.back().cumulative_gap + cb[k].cumulative_gap).epsilon(1e-12));
    CHECK(cab[6 + k].budget_consumed == doctest::Approx(ca.back().budget_consumed + cb[k].budget_consumed).epsilon(1e-12));
  }
}

TEST_CASE("checkpoints and averaging") {
  const auto cp = budget_checkpoints(200.0);
  REQUIRE(cp.size() == 100);
  CHECK(cp.front() == 2.0);
  CHECK(cp.back() == 200.0);
  CHECK(average_series({{1.0, 2.0}, {3.0, 6.0}}) == std::vector<double>{2.0, 4.0});
  CHECK(average_series({}).empty());
  CHECK_THROWS_AS(average_series({{1.0}, {1.0, 2.0}}), ValidationError);
}

TEST_CASE("diagnostics match an independent enumeration") {
  Rng rng(7);
  for (int k = 0; k < 10; ++k) {
    const DirectedGraph g = k == 0 ? path_graph(3) : oracle::random_small_graph(5, 10, rng);
    const NodeId n = g.node_count();
    const WeightVector w = k == 0 ? WeightVector::Constant(2, 0.5) : oracle::random_weights(g, rng);
    const CostVector c = oracle::random_costs(n, rng);
    const GapEvaluator eval(g, w, c, 0.1);
    const DiagnosticsReport report = diagnostics(g, eval);
    const double factor = 1.0 - kInvE - 0.1;
    for (NodeId i = 0; i < n; ++i) {
      double gap_min = std::numeric_limits<double>::infinity(), p_max = 0.0;
      for (std::uint64_t m = 1; m < (std::uint64_t{1} << n); ++m) {
        const NodeSet s = oracle::set_of(m);
        const std::vector<double> p = oracle::probs(g, w, s);
        if (!(p[i] > 0.0)) continue;
        double sigma = 0.0, weighted = 0.0;
        for (NodeId v = 0; v < n; ++v) {
          sigma += p[v];
          weighted += g.out_degree(v) * p[v];
        }
        const double d = factor * eval.lambda_star().value * oracle::total_cost(c, m) - sigma;
        if (d > 1e-12) gap_min = std::min(gap_min, d);
        p_max = std::max(p_max, weighted);
      }
      CHECK(report.nodes[i].p_max == doctest::Approx(p_max).epsilon(1e-10));
      if (std::isinf(gap_min))
        CHECK(std::isinf(report.nodes[i].gap_min));
      else
        CHECK(report.nodes[i].gap_min == doctest::Approx(gap_min).epsilon(1e-9));
    }
  }
}

TEST_CASE("diagnostics edge cases") {
  const DirectedGraph single(1, {});
  const CostVector c{Eigen::VectorXd::Constant(1, 0.5), 1.0};
  const DiagnosticsReport one = diagnostics(single, GapEvaluator(single, WeightVector(), c, 0.1));
  CHECK(one.nodes[0].p_max == 0.0);
  CHECK(std::isinf(one.nodes[0].gap_min));  // gap({0}) = (1-1/e-0.1) - 1 < 0

  // Node 2 is unreachable, so only sets containing it qualify.
  const DirectedGraph g(3, {{0, 1}});
  const CostVector c3{Eigen::Vector3d(0.9, 0.9, 0.9), 1.0};
  const GapEvaluator eval(g, WeightVector::Constant(1, 1.0), c3, 0.0);
  const DiagnosticsReport r = diagnostics(g, eval);
  // Sets containing 2 reach at most nodes {0,1,2}; the weighted reach counts d_0 = 1.
  CHECK(r.nodes[2].p_max == 1.0);
  double best = std::numeric_limits<double>::infinity();
  for (const NodeSet& s : {NodeSet{2}, NodeSet{0, 2}, NodeSet{1, 2}, NodeSet{0, 1, 2}}) {
    const double d = eval.gap(s);
    if (d > 0.0) best = std::min(best, d);
  }
  CHECK(r.nodes[2].gap_min == best);

  const DirectedGraph big = complete_graph(13);
  TruthOptions opts;
  opts.replicates = 10;
  const GapEvaluator too_big(big, WeightVector::Constant(156, 0.01), degree_proportional_costs(big, 1.0), 0.1, opts);
  CHECK_THROWS_AS(diagnostics(big, too_big), GuardError);
}

TEST_CASE("trace CSV writes only counted rounds") {
  EpisodeTrace trace;
  trace.rounds.push_back(round_of(1, {0, 2}, 1.5));
  trace.rounds.back().spread = 3;
  trace.rounds.push_back(round_of(2, {1}, 2.0));
  trace.exhausted = true;
  std::ostringstream out;
  write_trace_csv_header(out);
  write_trace_csv(out, 4, trace, {0.25});
  CHECK(out.str() ==
        "run_id,t,budget_consumed,seed_set_size,paid_cost,spread,gap,cumulative_gap\n"
        "4,1,1.5,2,1.5,3,0.25,0.25\n");
}
