#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "boim/evaluation.hpp"
#include "boim/graph.hpp"
#include "boim/policies.hpp"

namespace boim {

struct GraphSource {
  enum class Kind { File, Complete, Path, Star, Random };
  Kind kind = Kind::Complete;
  std::filesystem::path file;
  NodeId nodes = 10;
  double density = 0.3;
  std::uint64_t seed = 0;
};

struct WeightModel {
  enum class Kind { Uniform, Constant, Explicit };
  Kind kind = Kind::Uniform;
  double low = 0.0;
  double high = 0.1;
  double value = 0.1;
  std::vector<double> values;
  std::uint64_t seed = 0;
};

struct CostModel {
  enum class Kind { Degree, Uniform, Explicit };
  Kind kind = Kind::Degree;
  double fixed = 1.0;
  double low = 0.0;
  double high = 1.0;
  std::vector<double> values;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

struct PolicyEntry {
  std::string name;
  PolicyConfig config;
};

struct ExperimentConfig {
  GraphSource graph;
  WeightModel weights;
  CostModel costs;
  std::vector<PolicyEntry> policies;
  double budget = 0.0;
  int runs = 1;
  std::uint64_t master_seed = 1;
  std::filesystem::path output_dir = "boim-out";
  double epsilon = 0.1;  // slack of the gap benchmark
  TruthOptions truth;

  void validate() const;
};

/// Flat INI text: [experiment], [graph], [weights], [costs] and one
/// [policy NAME] section per policy. Unknown keys are errors.
///
/// Overrides are "section.key=value"; "policy.NAME.key=value" addresses a
/// policy section and creates it when missing. They are applied before
/// validation.
ExperimentConfig parse_experiment_config(std::istream& in,
                                         const std::vector<std::string>& overrides = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const std::vector<std::string>& overrides = {});

/// "appendix-i" or "facebook", as INI text.
std::string preset_text(const std::string& name);
ExperimentConfig experiment_preset(const std::string& name,
                                   const std::vector<std::string>& overrides = {});

DirectedGraph build_graph(const GraphSource& source);
WeightVector build_weights(const WeightModel& model, const DirectedGraph& g);
CostVector build_costs(const CostModel& model, const DirectedGraph& g);

/// Pure in (master seed, stream tag, indices).
std::uint64_t policy_seed(std::uint64_t master, std::size_t policy, int run);
std::uint64_t environment_seed(std::uint64_t master, int run);

struct RunSummary {
  int run_id = 0;
  std::size_t rounds = 0;          // tau_B, or the round cap
  std::size_t counted_rounds = 0;  // tau_B - 1
  bool exhausted = false;
  double final_regret = 0.0;
  std::size_t accepted = 0;  // condition outcomes among counted rounds
  std::size_t replaced = 0;
  std::size_t augmented = 0;
  std::vector<double> curve;  // cumulative gap at the budget checkpoints
};

struct PolicyResult {
  std::string name;
  PolicyConfig config;
  std::vector<RunSummary> runs;
  std::vector<double> mean_curve;

  double acceptance_rate() const;
};

struct ExperimentResult {
  NodeId node_count = 0;
  EdgeId edge_count = 0;
  LambdaStar lambda;
  std::vector<double> checkpoints;
  std::vector<PolicyResult> policies;
};

/// Worker count from BOIM_WORKERS, else the hardware concurrency.
unsigned worker_count();

/// Runs every (policy, run) cell. When `write_outputs`, writes one trace CSV
/// per cell plus curves.csv and summary.csv under config.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_outputs = true);

void print_summary(std::ostream& out, const ExperimentResult& result);

}  // namespace boim
