#include <doctest.h>

#include <cmath>
#include <sstream>

#include "boim/environment.hpp"
#include "boim/estimation.hpp"
#include "oracles.hpp"

using namespace boim;

namespace {

FeedbackRecord path_feedback() {
  FeedbackRecord fb;
  fb.observed_edges = {{0, 1}, {1, 0}};
  fb.seed_costs = {{0, 0.4}};
  fb.fixed_cost = 1.0;
  fb.influenced = {0, 1};
  fb.realized_spread = 2;
  return fb;
}

/// Single edge 0 -> 1 whose statistics are written directly into the state text.
BanditState single_edge_state(long round, int count, double edge_sum, int cost_count,
                              double cost_sum) {
  std::ostringstream text;
  text << "boim-bandit-state 1\nround " << round << "\ninitial_budget 100\nspent 0\n"
       << "fixed_cost_count " << cost_count << "\nfixed_cost_sum " << cost_sum << "\n"
       << "weight_counts 2 " << count << " 0\nedge_sums 1 " << edge_sum << "\n"
       << "cost_counts 2 " << cost_count << " 0\ncost_sums 2 " << cost_sum << " 0\n";
  std::istringstream in(text.str());
  return BanditState::read(in);
}

}  // namespace

TEST_CASE("update follows the counter rules on the path example") {
  const DirectedGraph g = path_graph(3);
  BanditState s(g, 10.0);
  s.update(g, {0}, path_feedback());
  CHECK(s.round() == 2);
  CHECK(s.weight_counts() == Eigen::Vector3i(1, 1, 0));
  CHECK(s.edge_sums() == Eigen::Vector2d(1.0, 0.0));
  CHECK(s.cost_counts() == Eigen::Vector3i(1, 0, 0));
  CHECK(s.fixed_cost_count() == 1);
  CHECK(s.spent() == doctest::Approx(1.4));
  CHECK(s.remaining_budget() == doctest::Approx(8.6));

  s.update(g, {0}, path_feedback());
  CHECK(s.weight_counts() == Eigen::Vector3i(2, 2, 0));
  CHECK(s.cost_counts()[0] == 2);
  CHECK(s.fixed_cost_count() == 2);
}

TEST_CASE("empty seed set only counts the fixed cost") {
  const DirectedGraph g = path_graph(3);
  BanditState s(g, 10.0);
  FeedbackRecord fb;
  fb.fixed_cost = 0.5;
  s.update(g, {}, fb);
  CHECK(s.weight_counts().sum() == 0);
  CHECK(s.cost_counts().sum() == 0);
  CHECK(s.fixed_cost_count() == 1);
  CHECK(s.fixed_cost_sum() == 0.5);
}

TEST_CASE("inconsistent feedback is rejected") {
  const DirectedGraph g = path_graph(3);
  BanditState s(g, 10.0);
  FeedbackRecord fb = path_feedback();
  fb.realized_spread = 3;
  CHECK_THROWS_AS(s.update(g, {0}, fb), ValidationError);
  fb = path_feedback();
  CHECK_THROWS_AS(s.update(g, {1}, fb), ValidationError);
  fb.observed_edges.pop_back();
  CHECK_THROWS_AS(s.update(g, {0}, fb), ValidationError);
  fb = path_feedback();
  fb.observed_edges[0].second = 2;
  CHECK_THROWS_AS(s.update(g, {0}, fb), ValidationError);
  fb = path_feedback();
  fb.seed_costs[0].second = 1.5;
  CHECK_THROWS_AS(s.update(g, {0}, fb), ValidationError);
  fb = path_feedback();
  fb.influenced = {1};
  fb.realized_spread = 1;
  fb.observed_edges = {{1, 0}};
  CHECK_THROWS_AS(s.update(g, {0}, fb), ValidationError);
  CHECK(s == BanditState(g, 10.0));
}

TEST_CASE("budget-exhausting round records costs but not diffusion") {
  const DirectedGraph g = path_graph(3);
  BanditState s(g, 1.0);
  s.update_costs_only({0}, path_feedback());
  CHECK(s.weight_counts().sum() == 0);
  CHECK(s.edge_sums().sum() == 0.0);
  CHECK(s.cost_counts()[0] == 1);
  CHECK(s.fixed_cost_count() == 1);
  CHECK(s.remaining_budget() == doctest::Approx(-0.4));
}

TEST_CASE("weight UCB closed forms") {
  const DirectedGraph g(2, {{0, 1}});
  CHECK(weight_ucb(BanditState(g, 1.0), g)[0] == 1.0);
  CHECK(weight_ucb(single_edge_state(100, 24, 0.2 * 24, 0, 0), g)[0] ==
        doctest::Approx(0.7364915065723368).epsilon(1e-12));
  CHECK(weight_ucb(single_edge_state(100, 4, 0.9 * 4, 0, 0), g)[0] == 1.0);
}

TEST_CASE("cost LCB closed forms") {
  const DirectedGraph g(2, {{0, 1}});
  const CostVector fresh = cost_lcb(BanditState(g, 1.0));
  CHECK(fresh.node.isZero());
  CHECK(fresh.fixed == 0.0);
  CHECK(cost_lcb(single_edge_state(100, 0, 0, 4, 0.4)).node[0] == 0.0);
  const CostVector c = cost_lcb(single_edge_state(100, 0, 0, 600, 0.8 * 600));
  CHECK(c.node[0] == doctest::Approx(0.6927016986855327).epsilon(1e-12));
  CHECK(c.fixed == doctest::Approx(0.6927016986855327).epsilon(1e-12));
  CHECK(c.node[1] == 0.0);
}

TEST_CASE("ellipsoid radius closed forms") {
  CHECK(ellipsoid_radius(100, 10) == doctest::Approx(46.862651391365816).epsilon(1e-12));
  CHECK(ellipsoid_radius(3, 0) == doctest::Approx(3.573415887803016).epsilon(1e-12));
  CHECK(ellipsoid_radius(2, 7) == ellipsoid_radius(3, 7));
  CHECK(ellipsoid_radius(1, 7) == ellipsoid_radius(3, 7));
  for (long t = 3; t < 200; ++t) CHECK(ellipsoid_radius(t + 1, 5) > ellipsoid_radius(t, 5));
}

TEST_CASE("ellipsoid membership") {
  const DirectedGraph g = path_graph(3);
  BanditState s(g, 10.0);
  CHECK(ellipsoid_contains(s, g, WeightVector::Zero(2)));
  for (int k = 0; k < 5; ++k) s.update(g, {0}, path_feedback());
  CHECK(ellipsoid_contains(s, g, mean_weights(s, g)));
  // 5 * (0 - 1)^2 + 5 * (1 - 0)^2 = 10 > delta(6) with |E| = 2.
  CHECK(ellipsoid_radius(6, 2) < 10.0);
  CHECK_FALSE(ellipsoid_contains(s, g, Eigen::Vector2d(0.0, 1.0)));
}

TEST_CASE("mean weights default to 1 on untouched sources") {
  const DirectedGraph g = path_graph(3);
  BanditState s(g, 10.0);
  FeedbackRecord fb;
  fb.observed_edges = {{0, 0}};
  fb.seed_costs = {{0, 0.1}};
  fb.influenced = {0};
  fb.realized_spread = 1;
  s.update(g, {0}, fb);
  CHECK(mean_weights(s, g) == Eigen::Vector2d(0.0, 1.0));
}

TEST_CASE("serialization round-trips bit for bit") {
  Rng rng(1);
  const DirectedGraph g = random_graph(9, 0.3, rng);
  Environment env(g, oracle::random_weights(g, rng), oracle::random_costs(9, rng), 0.3, 2);
  BanditState s(g, 1e6);
  for (int t = 0; t < 200; ++t) {
    const NodeSet seeds = make_node_set({static_cast<NodeId>(rng() % 9), static_cast<NodeId>(rng() % 9)});
    s.update(g, seeds, env.play(seeds));
  }
  std::stringstream text;
  s.write(text);
  const BanditState back = BanditState::read(text);
  CHECK(back == s);
  std::istringstream bad("not-a-state 1\n");
  CHECK_THROWS_AS(BanditState::read(bad), ValidationError);
  std::istringstream future("boim-bandit-state 9\n");
  CHECK_THROWS_AS(BanditState::read(future), ValidationError);
}

TEST_CASE("replaying recorded feedback reproduces the state") {
  Rng rng(3);
  const DirectedGraph g = random_graph(7, 0.4, rng);
  Environment env(g, oracle::random_weights(g, rng), oracle::random_costs(7, rng), 0.2, 4);
  BanditState live(g, 500.0);
  std::vector<std::pair<NodeSet, FeedbackRecord>> log;
  for (int t = 0; t < 100; ++t) {
    const NodeSet seeds{static_cast<NodeId>(rng() % 7)};
    log.emplace_back(seeds, env.play(seeds));
    live.update(g, seeds, log.back().second);
  }
  BanditState replay(g, 500.0);
  for (const auto& [seeds, fb] : log) replay.update(g, seeds, fb);
  CHECK(replay == live);
}

TEST_CASE("state invariants and confidence coverage over a long run") {
  Rng rng(5);
  const DirectedGraph g = random_graph(6, 0.3, rng);
  const WeightVector w = oracle::random_weights(g, rng);
  const CostVector c = oracle::random_costs(6, rng);
  Environment env(g, w, c, 0.3, 6);
  BanditState s(g, 1e9);
  int ellipsoid_misses = 0, interval_misses = 0;
  const int rounds = 2000;
  for (int t = 1; t <= rounds; ++t) {
    const WeightVector ucb = weight_ucb(s, g), mean = mean_weights(s, g);
    const CostVector lcb = cost_lcb(s);
    CHECK(s.fixed_cost_count() == s.round() - 1);
    bool escaped = false;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      REQUIRE(ucb[e] >= mean[e]);
      escaped |= ucb[e] < w[e];
    }
    for (NodeId i = 0; i < 6; ++i) {
      REQUIRE(s.cost_sums()[i] <= s.cost_counts()[i]);
      if (s.cost_counts()[i] > 0) REQUIRE(lcb.node[i] <= s.cost_sums()[i] / s.cost_counts()[i]);
      escaped |= lcb.node[i] > c.node[i];
    }
    escaped |= lcb.fixed > c.fixed;
    interval_misses += escaped;
    ellipsoid_misses += !ellipsoid_contains(s, g, w);
    const NodeSet seeds{static_cast<NodeId>(rng() % 6)};
    s.update(g, seeds, env.play(seeds));
  }
  CHECK(ellipsoid_misses <= 0.05 * rounds);
  CHECK(interval_misses <= 0.10 * rounds);
}
