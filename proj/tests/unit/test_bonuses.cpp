#include <doctest.h>

#include <cmath>
#include <sstream>

#include "boim/bonuses.hpp"
#include "boim/environment.hpp"
#include "oracles.hpp"

using namespace boim;

namespace {

constexpr double kDelta100 = 46.862651391365816;  // delta(100) with |E| = 10
constexpr double kTol = 1e-12;

BonusContext context(NodeId n, EdgeId m, std::vector<double> scale) {
  BonusContext ctx;
  ctx.radius = kDelta100;
  ctx.node_count = n;
  ctx.edge_count = m;
  ctx.scale = Eigen::Map<Eigen::ArrayXd>(scale.data(), static_cast<Eigen::Index>(scale.size()));
  ctx.cost_counts = Eigen::VectorXi::Zero(n);
  return ctx;
}

Eigen::VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct Instance {
  DirectedGraph g;
  BanditState state;
  WeightVector mean;
  BonusContext ctx;
};

/// Random graph with |E| <= 10 and a state after a random number of played rounds.
Instance random_instance(Rng& rng, NodeId n = 6) {
  DirectedGraph g = oracle::random_small_graph(n, 10, rng);
  Environment env(g, oracle::random_weights(g, rng), oracle::random_costs(n, rng), 0.2, rng());
  BanditState s(g, 1e9);
  const int rounds = static_cast<int>(rng() % 40);
  for (int t = 0; t < rounds; ++t) {
    const NodeSet seeds = make_node_set({static_cast<NodeId>(rng() % n), static_cast<NodeId>(rng() % n)});
    s.update(g, seeds, env.play(seeds));
  }
  WeightVector mean = mean_weights(s, g);
  BonusContext ctx = BonusContext::from(s, g);
  return {std::move(g), std::move(s), std::move(mean), std::move(ctx)};
}

NodeSet random_set(NodeId n, Rng& rng) {
  return oracle::set_of(rng() % (std::uint64_t{1} << n));
}

}  // namespace

TEST_CASE("context scale is delta d_i / N^w_i, zero for untouched nodes") {
  Rng rng(1);
  for (int k = 0; k < 20; ++k) {
    const Instance in = random_instance(rng);
    const double delta = ellipsoid_radius(in.state.round(), in.g.edge_count());
    CHECK(in.ctx.radius == delta);
    CHECK(in.ctx.node_count == in.g.node_count());
    CHECK(in.ctx.edge_count == in.g.edge_count());
    for (NodeId i = 0; i < in.g.node_count(); ++i) {
      const int count = in.state.weight_counts()[i];
      const double expected = count == 0 ? 0.0 : delta * in.g.out_degree(i) / count;
      CHECK(in.ctx.scale[i] == doctest::Approx(expected).epsilon(kTol));
    }
  }
}

TEST_CASE("bonus closed forms") {
  const BonusContext ctx = context(3, 10, {kDelta100 * 2.0 / 8.0, 0.0, 0.0});
  const Eigen::Vector3d p(0.5, 0.7, 0.1);
  CHECK(bonus(ctx, p) == doctest::Approx(5.134222570910154).epsilon(kTol));
  CHECK(bonus(ctx, Eigen::Vector3d::Zero()) == 0.0);
  CHECK(bonus(context(3, 10, {0, 0, 0}), p) == 0.0);
  // One-node support: bonus2 and bonus are the same single term.
  CHECK(bonus2(ctx, p) == doctest::Approx(bonus(ctx, p)).epsilon(kTol));
  CHECK(bonus2(ctx, Eigen::Vector3d::Zero()) == 0.0);
  CHECK(bonus3(ctx, Eigen::Vector3d::Zero()) == 0.0);
  const BonusContext full = context(3, 10, {1.0, 2.0, 3.0});
  CHECK(bonus3(full, Eigen::Vector3d::Ones()) == doctest::Approx(bonus(full, Eigen::Vector3d::Ones())).epsilon(kTol));
}

TEST_CASE("bonus1 on empty and singleton sets") {
  const BonusContext ctx = context(3, 10, {1.0, 2.0, 0.5});
  CHECK(bonus1(ctx, Eigen::MatrixXd(3, 0)) == 0.0);
  const Eigen::Vector3d p(1.0, 0.3, 0.2);
  CHECK(bonus1(ctx, Eigen::MatrixXd(p)) == bonus(ctx, p));
}

TEST_CASE("bonus5 closed forms and weight independence") {
  BonusContext ctx = context(5, 10, {0, 0, 0, 0, 0});
  ctx.cost_counts << 0, 32, 8, 3, 100;
  CHECK(bonus5(ctx, {}) == 0.0);
  CHECK(bonus5(ctx, {1}) == doctest::Approx(54.11945779440481).epsilon(kTol));
  const double unit = 5.0 * std::sqrt(kDelta100 * 10.0);
  CHECK(bonus5(ctx, {0}) == doctest::Approx(unit).epsilon(kTol));
  CHECK(bonus5(ctx, {2}) == doctest::Approx(unit).epsilon(kTol));
  CHECK(bonus5(ctx, {3}) == doctest::Approx(unit).epsilon(kTol));

  // Modular under the square root.
  Rng rng(2);
  for (int k = 0; k < 50; ++k) {
    const NodeSet s = random_set(5, rng);
    double squared = 0.0;
    for (NodeId j : s) squared += std::pow(bonus5(ctx, {j}), 2);
    CHECK(std::pow(bonus5(ctx, s), 2) == doctest::Approx(squared).epsilon(1e-9));
  }

  // Perturbing the weight statistics leaves bonus5 unchanged.
  const Instance in = random_instance(rng);
  std::stringstream text;
  in.state.write(text);
  std::string body = text.str();
  const auto pos = body.find("edge_sums");
  const auto end = body.find('\n', pos);
  std::string zeros = "edge_sums " + std::to_string(in.g.edge_count());
  for (EdgeId e = 0; e < in.g.edge_count(); ++e) zeros += " 0";
  body.replace(pos, end - pos, zeros);
  std::istringstream perturbed(body);
  const BanditState other = BanditState::read(perturbed);
  CHECK(other.edge_sums().isZero());
  const BonusContext ctx2 = BonusContext::from(other, in.g);
  for (NodeId j = 0; j < in.g.node_count(); ++j) CHECK(bonus5(ctx2, {j}) == bonus5(in.ctx, {j}));
}

TEST_CASE("bonus ordering chain with exact probabilities") {
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    const Instance in = random_instance(rng);
    const NodeId n = in.g.node_count();
    const NodeSet s = random_set(n, rng);
    const Eigen::VectorXd p = as_vector(oracle::probs(in.g, in.mean, s));
    Eigen::MatrixXd singles(n, static_cast<Eigen::Index>(s.size()));
    for (std::size_t j = 0; j < s.size(); ++j) singles.col(j) = as_vector(oracle::probs(in.g, in.mean, {s[j]}));
    const double b = bonus(in.ctx, p), b1 = bonus1(in.ctx, singles), b2 = bonus2(in.ctx, p),
                 b3 = bonus3(in.ctx, p);
    const std::vector<double> values(in.ctx.scale.data(), in.ctx.scale.data() + n);
    const double b4 = n * oracle::sqrt_reach(in.g, in.mean, s, values);
    const double tol = kTol * std::max(1.0, b3);
    CHECK(b <= b1 + tol);
    CHECK(b1 <= s.size() * b + tol);
    CHECK(b <= b2 + tol);
    CHECK(b2 <= std::sqrt(static_cast<double>(n)) * b + tol);
    CHECK(b <= b3 + tol);
    CHECK(b4 <= b3 + tol);
    const ExactOracle exact(in.g, in.mean);
    CHECK(bonus4(in.ctx, s, exact) == doctest::Approx(b4).epsilon(1e-10));
  }
}

TEST_CASE("every bonus kind is monotone in the seed set") {
  Rng rng(4);
  const BonusKind kinds[] = {BonusKind::Full, BonusKind::One, BonusKind::Two,
                             BonusKind::Three, BonusKind::Four, BonusKind::Five};
  for (int k = 0; k < 40; ++k) {
    Instance in = random_instance(rng, 5);
    for (NodeId i = 0; i < 5; ++i) in.ctx.cost_counts[i] = static_cast<int>(rng() % 20);
    const ExactOracle exact(in.g, in.mean);
    for (BonusKind kind : kinds) {
      const BonusEvaluator f(in.ctx, kind, exact);
      for (std::uint64_t m = 0; m < 32; ++m)
        for (NodeId j = 0; j < 5; ++j) {
          if ((m >> j) & 1U) continue;
          const NodeSet a = oracle::set_of(m), b = with_node(a, j);
          CHECK(f(b) >= f(a) - kTol * std::max(1.0, f(b)));
        }
    }
  }
}

TEST_CASE("marginal structure: bonus3 and bonus4 submodular, bonus1 modular") {
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const Instance in = random_instance(rng, 5);
    const ExactOracle exact(in.g, in.mean);
    const BonusEvaluator b1(in.ctx, BonusKind::One, exact), b3(in.ctx, BonusKind::Three, exact),
        b4(in.ctx, BonusKind::Four, exact);
    for (std::uint64_t small = 0; small < 32; ++small)
      for (std::uint64_t big = small; big < 32; big = (big + 1) | small) {
        for (NodeId j = 0; j < 5; ++j) {
          if ((big >> j) & 1U) continue;
          const NodeSet a = oracle::set_of(small), b = oracle::set_of(big);
          const double tol = 1e-10 * std::max(1.0, b3(with_node(b, j)));
          CHECK(b3(with_node(a, j)) - b3(a) >= b3(with_node(b, j)) - b3(b) - tol);
          CHECK(b4(with_node(a, j)) - b4(a) >= b4(with_node(b, j)) - b4(b) - tol);
          CHECK(b1(with_node(a, j)) - b1(a) == doctest::Approx(b1(with_node(b, j)) - b1(b)).epsilon(1e-9));
        }
      }
  }
}

TEST_CASE("bonus4 by Monte-Carlo") {
  const DirectedGraph g = path_graph(3);
  const BonusContext ctx = context(3, 2, {2.0, 3.0, 0.0});
  CHECK(bonus4(ctx, {}, g, WeightVector::Constant(2, 0.5), 100, 1) == 0.0);
  // All-live: deterministic square root over the reached nodes.
  CHECK(bonus4(ctx, {1}, g, WeightVector::Ones(2), 10, 1) == doctest::Approx(3.0 * std::sqrt(3.0)).epsilon(kTol));

  const WeightVector w = WeightVector::Constant(2, 0.5);
  // Four equally likely realizations; from {0}: reach {0} w.p. 1/2, {0,1} w.p. 1/2.
  const double exact = 3.0 * oracle::sqrt_reach(g, w, {0}, {2.0, 3.0, 0.0});
  CHECK(exact == doctest::Approx(1.5 * (std::sqrt(2.0) + std::sqrt(5.0))).epsilon(kTol));
  const double second = 9.0 * 0.5 * (2.0 + 5.0);
  const double sd = std::sqrt(second - exact * exact);
  const std::size_t reps = 20000;
  const double estimate = bonus4(ctx, {0}, g, w, reps, 7);
  CHECK(std::abs(estimate - exact) <= 3.0 * sd / std::sqrt(static_cast<double>(reps)));
  CHECK(bonus4(ctx, {0}, g, w, reps, 7) == estimate);
}

TEST_CASE("optimistic spread: empty set and fresh state") {
  Rng rng(6);
  const DirectedGraph g = random_graph(7, 0.3, rng);
  const BanditState fresh(g, 10.0);
  const BonusContext ctx = BonusContext::from(fresh, g);
  const ExactOracle unit(g, mean_weights(fresh, g));
  const NodeSet s{0, 3};
  const auto reached = oracle::reach(g, ~std::uint64_t{0}, s);
  double count = 0.0;
  for (auto r : reached) count += r;
  for (BonusKind kind : {BonusKind::Full, BonusKind::One, BonusKind::Two, BonusKind::Three, BonusKind::Four}) {
    CHECK(optimistic_spread(ctx, {}, unit, kind) == 0.0);
    CHECK(optimistic_spread(ctx, s, unit, kind) == doctest::Approx(count).epsilon(kTol));
  }
  CHECK(optimistic_spread(ctx, s, unit, BonusKind::Five) ==
        doctest::Approx(count + bonus5(ctx, s)).epsilon(kTol));
}

TEST_CASE("optimistic spread covers the true spread over a simulated run") {
  Rng rng(7);
  const DirectedGraph g = oracle::random_small_graph(6, 10, rng);
  const WeightVector w = oracle::random_weights(g, rng);
  Environment env(g, w, oracle::random_costs(6, rng), 0.2, 8);
  BanditState s(g, 1e9);
  int covered[3] = {0, 0, 0};
  const int rounds = 400;
  for (int t = 0; t < rounds; ++t) {
    const NodeSet seeds = random_set(6, rng);
    const BonusContext ctx = BonusContext::from(s, g);
    const ExactOracle at_mean(g, mean_weights(s, g));
    const double truth = oracle::spread(g, w, seeds);
    covered[0] += truth <= optimistic_spread(ctx, seeds, at_mean, BonusKind::Two) + kTol;
    covered[1] += truth <= optimistic_spread(ctx, seeds, at_mean, BonusKind::Three) + kTol;
    covered[2] += truth <= optimistic_spread(ctx, seeds, at_mean, BonusKind::Five) + kTol;
    s.update(g, seeds, env.play(seeds));
  }
  for (int c : covered) CHECK(c >= 0.95 * rounds);
}

TEST_CASE("bonus kind names") {
  CHECK(to_string(BonusKind::Full) == "bonus");
  CHECK(to_string(BonusKind::Four) == "bonus4");
}
