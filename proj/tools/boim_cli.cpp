// boim: run experiments, print lambda* for an instance, or run the property suites.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "boim/evaluation.hpp"
#include "boim/harness.hpp"
#include "boim/verify.hpp"

namespace {

boim::ExperimentConfig load(const std::string& path, const std::string& preset,
                            const std::vector<std::string>& overrides) {
  if (!path.empty() && !preset.empty())
    throw boim::ValidationError("give either a config file or --preset, not both");
  if (!preset.empty()) return boim::experiment_preset(preset, overrides);
  if (path.empty()) throw boim::ValidationError("a config file or --preset is required");
  return boim::load_experiment_config(path, overrides);
}

void print_set(const boim::NodeSet& s, const boim::DirectedGraph& g) {
  std::cout << '{';
  for (std::size_t k = 0; k < s.size(); ++k) std::cout << (k ? " " : "") << g.label(s[k]);
  std::cout << '}';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budgeted online influence maximization"};
  app.require_subcommand(1);

  std::string config_path, preset;
  std::vector<std::string> overrides;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run every policy x run cell and write CSV outputs");
  run->add_option("config", config_path, "INI experiment config");
  run->add_option("--preset", preset, "appendix-i or facebook");
  run->add_option("--set", overrides, "Override, e.g. experiment.runs=2 or policy.cucb.epsilon=0.2");
  run->add_flag("--quiet", quiet, "Skip the summary table");
  bool print_preset = false;
  run->add_flag("--print-config", print_preset, "Print the preset text and exit");

  auto* oracle = app.add_subcommand("oracle", "Print the best seed set and lambda* of an instance");
  oracle->add_option("config", config_path, "INI experiment config");
  oracle->add_option("--preset", preset, "appendix-i or facebook");
  oracle->add_option("--set", overrides, "Override, e.g. graph.nodes=6");

  boim::VerifyOptions verify_options;
  std::string fault;
  auto* verify = app.add_subcommand("verify", "Run the property suites on seeded corpora");
  verify->add_option("--seed", verify_options.seed, "Corpus seed");
  verify->add_option("--instances", verify_options.instances, "Instances per suite")
      ->check(CLI::PositiveNumber);
  verify->add_option("--sketch-rebuilds", verify_options.sketch_rebuilds, "Sketch rebuilds, pooled over the graph corpus")
      ->check(CLI::PositiveNumber);
  verify->add_option("--inject", fault, "Inject a fault: negated-bonus");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (print_preset) {
        std::cout << boim::preset_text(preset.empty() ? "appendix-i" : preset);
        return EXIT_SUCCESS;
      }
      const boim::ExperimentConfig config = load(config_path, preset, overrides);
      const boim::ExperimentResult result = boim::run_experiment(config);
      if (!quiet) boim::print_summary(std::cout, result);
      std::cout << "outputs written to " << config.output_dir.string() << '\n';
      return EXIT_SUCCESS;
    }
    if (*oracle) {
      const boim::ExperimentConfig config = load(config_path, preset, overrides);
      const boim::DirectedGraph g = boim::build_graph(config.graph);
      const boim::WeightVector w = boim::build_weights(config.weights, g);
      const boim::CostVector c = boim::build_costs(config.costs, g);
      const boim::LambdaStar best = boim::lambda_star(g, w, c, config.truth);
      std::cout << "S* = ";
      print_set(best.set, g);
      std::cout << "\nlambda* = " << best.value << " (" << boim::to_string(best.provenance) << ")\n";
      return EXIT_SUCCESS;
    }
    verify_options.fault = boim::parse_fault(fault);
    const auto results = boim::run_property_suites(verify_options);
    return boim::print_verify_report(std::cout, results) ? EXIT_SUCCESS : EXIT_FAILURE;
  } catch (const std::exception& e) {
    std::cerr << "boim: " << e.what() << '\n';
    return 2;
  }
}
