#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include "boim/core.hpp"
#include "boim/graph.hpp"
#include "boim/policies.hpp"
#include "boim/spread_oracle.hpp"

namespace boim {

/// How lambda* was obtained: full enumeration with exact spreads, full
/// enumeration with Monte-Carlo spreads, or the greedy ratio.
enum class Provenance { Exact, EnumeratedMc, Approximate };

std::string_view to_string(Provenance p);

struct LambdaStar {
  double value = 0.0;
  NodeSet set;
  Provenance provenance = Provenance::Exact;
};

/// Settings for evaluating spreads under the true weights.
struct TruthOptions {
  std::size_t replicates = 100000;  // used whenever |E| > 25
  std::uint64_t seed = 0x5eed;
  std::optional<double> round_budget;
};

/// max_S sigma(S; w*) / (c*(S) + c0*). Under a per-round budget the comparator
/// class is every distribution on subsets with expected total cost <= b, and
/// `set` is left empty when the optimum is a mixture.
LambdaStar lambda_star(const DirectedGraph& g, const WeightVector& w, const CostVector& c,
                       const TruthOptions& options = {});

/// (1 - 1/e - eps) lambda* (c(S) + c0) - sigma(S; w*), exact spreads.
double gap(const DirectedGraph& g, const WeightVector& w, const CostVector& c, double lambda,
           double epsilon, const NodeSet& seeds);

/// Gap evaluation against fixed truth, memoized per seed set. Safe to share
/// between threads.
class GapEvaluator {
 public:
  GapEvaluator(const DirectedGraph& g, WeightVector w, CostVector c, double epsilon,
               TruthOptions options = {});

  const LambdaStar& lambda_star() const noexcept { return lambda_; }
  Estimate spread(const NodeSet& seeds) const;
  double gap(const NodeSet& seeds) const;
  /// Standard error of gap(S); zero with exact spreads.
  double gap_std_error(const NodeSet& seeds) const { return spread(seeds).std_error; }
  double factor() const noexcept { return factor_; }
  const SpreadOracle& oracle() const noexcept { return *oracle_; }
  const CostVector& costs() const noexcept { return costs_; }

 private:
  const DirectedGraph* graph_;
  CostVector costs_;
  double factor_;
  std::unique_ptr<SpreadOracle> oracle_;
  LambdaStar lambda_;
  mutable std::mutex cache_mutex_;
  mutable std::map<NodeSet, Estimate> cache_;
};

/// Per-round gaps of the rounds that count (1..tau_B - 1).
std::vector<double> trace_gaps(const EpisodeTrace& trace, const GapEvaluator& evaluator);

struct CurvePoint {
  double budget_consumed = 0.0;
  double cumulative_gap = 0.0;
};

/// Cumulative gap after each counted round, against cumulative paid cost.
std::vector<CurvePoint> regret_curve(const EpisodeTrace& trace, const std::vector<double>& gaps);

/// Cumulative gap of the rounds whose consumed budget is <= x, for each x.
std::vector<double> curve_at(const std::vector<CurvePoint>& curve,
                             const std::vector<double>& checkpoints);

/// B k / 100 for k = 1..100.
std::vector<double> budget_checkpoints(double budget);

/// Pointwise mean of equally long series.
std::vector<double> average_series(const std::vector<std::vector<double>>& series);

struct NodeDiagnostics {
  double gap_min = 0.0;  // +inf when no qualifying set has a positive gap
  double p_max = 0.0;
};

struct DiagnosticsReport {
  std::vector<NodeDiagnostics> nodes;
  /// sum_i |V| (lambda* + d_i p_max,i |V|) / gap_min,i, the log B coefficient of
  /// the CUCB regret bound, reported for reference only.
  double cucb_bound_coefficient = 0.0;
};

inline constexpr NodeId kMaxDiagnosticNodes = 12;

/// Min positive gap over sets that can reach i, and max of sum_k d_k p_k over those sets.
DiagnosticsReport diagnostics(const DirectedGraph& g, const GapEvaluator& evaluator);

void write_trace_csv_header(std::ostream& out);
void write_trace_csv(std::ostream& out, int run_id, const EpisodeTrace& trace,
                     const std::vector<double>& gaps);

}  // namespace boim
