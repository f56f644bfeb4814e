#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boim/bonuses.hpp"
#include "boim/core.hpp"
#include "boim/environment.hpp"
#include "boim/estimation.hpp"
#include "boim/graph.hpp"
#include "boim/ratio_greedy.hpp"
#include "boim/spread_oracle.hpp"

namespace boim {

enum class PolicyVariant { Cucb, Cucb1, Cucb4, Cucb5, CucbPlus, Regularized };

std::string_view to_string(PolicyVariant v);
PolicyVariant parse_policy_variant(std::string_view text);

/// How spreads are evaluated inside a round. Auto is exact up to
/// kAutoExactEdges edges and Monte-Carlo beyond.
enum class OracleKind { Auto, Exact, MonteCarlo };

inline constexpr EdgeId kAutoExactEdges = 16;

std::string_view to_string(OracleKind k);
OracleKind parse_oracle_kind(std::string_view text);

struct PolicyConfig {
  PolicyVariant variant = PolicyVariant::Cucb;
  double epsilon = 0.1;
  bool known_costs = false;
  std::optional<double> round_budget;
  double lambda = 0.0;
  McSchedule schedule;
  OracleKind oracle = OracleKind::Auto;
  std::uint64_t seed = 0;
  long max_rounds = 100000;

  void validate() const;
};

enum class ConditionOutcome { NotApplicable, Accepted, Replaced };

std::string_view to_string(ConditionOutcome c);

struct Selection {
  NodeSet seeds;
  ConditionOutcome condition = ConditionOutcome::NotApplicable;
  std::optional<NodeId> augmented;
};

/// Seed selection from a BanditState. Never sees the environment; true costs
/// reach it only through the constructor when they are declared known.
class Policy {
 public:
  Policy(const DirectedGraph& g, PolicyConfig config, std::optional<CostVector> known_costs = {});

  Selection select(const BanditState& state) const;

  /// Ratio greedy on sigma(.; w_t) with costs c_t.
  Selection select_cucb(const BanditState& state) const;
  /// CUCB candidate checked against sigma(.; w-bar) + Bonus_kind, replaced by the
  /// greedy on that objective when the check fails, then augmented with the
  /// smallest under-explored node outside the set.
  Selection select_cucb_k(const BanditState& state, BonusKind kind) const;
  Selection select_cucb_plus(const BanditState& state) const;
  /// Lazy marginal greedy on sigma(S; w_t) - lambda c_t(S).
  Selection select_regularized(const BanditState& state) const;

  std::unique_ptr<SpreadOracle> make_oracle(const WeightVector& w, long round) const;
  CostVector round_costs(const BanditState& state) const;
  const PolicyConfig& config() const noexcept { return config_; }

 private:
  NodeSet maximize_ratio(const SetFunction& f, const CostVector& costs, long round) const;

  const DirectedGraph* graph_;
  PolicyConfig config_;
  std::optional<CostVector> known_costs_;
};

/// Smallest j outside `seeds` with N^w_j < delta(t) (strict) or N^w_j <= |E| delta(t).
std::optional<NodeId> augmentation_node(const BanditState& state, const DirectedGraph& g,
                                        const NodeSet& seeds, BonusKind kind);

struct RoundLog {
  long t = 0;
  NodeSet seeds;
  double paid = 0.0;
  int spread = 0;
  ConditionOutcome condition = ConditionOutcome::NotApplicable;
  std::optional<NodeId> augmented;
  double budget_after = 0.0;
};

/// Every played round, the budget-exhausting one last when `exhausted`.
struct EpisodeTrace {
  double budget = 0.0;
  std::vector<RoundLog> rounds;
  bool exhausted = false;

  /// Rounds 1..tau_B - 1, the ones whose reward counts.
  std::size_t counted_rounds() const { return exhausted ? rounds.size() - 1 : rounds.size(); }
};

/// Plays until the budget goes negative or config.max_rounds rounds have run.
EpisodeTrace run_episode(Environment& env, const PolicyConfig& config, double budget);

}  // namespace boim
