#include "boim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace boim {

namespace pt = boost::property_tree;

namespace {

constexpr std::uint64_t kGraphStream = 1;
constexpr std::uint64_t kWeightStream = 2;
constexpr std::uint64_t kCostStream = 3;
constexpr std::uint64_t kEnvironmentStream = 4;
constexpr std::uint64_t kPolicyStream = 5;

// Section contents with unknown keys rejected once everything was read.
class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  bool has(const std::string& key) const {
    return tree_ && tree_->find(key) != tree_->not_found();
  }

  std::string text(const std::string& key, const std::string& fallback = "") {
    seen_.push_back(key);
    if (!has(key)) return fallback;
    return tree_->find(key)->second.data();
  }

  std::string required(const std::string& key) {
    if (!has(key)) throw ValidationError("[" + name_ + "] is missing '" + key + "'");
    return text(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) {
      seen_.push_back(key);
      return fallback;
    }
    return parse_number(key, text(key));
  }

  template <typename Int>
  Int integer(const std::string& key, Int fallback) {
    if (!has(key)) {
      seen_.push_back(key);
      return fallback;
    }
    const std::string raw = text(key);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      if (!raw.empty() && raw.front() == '-') throw std::invalid_argument("negative");
      v = std::stoull(raw, &used, 0);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != raw.size() ||
        v > static_cast<unsigned long long>(std::numeric_limits<Int>::max()))
      throw ValidationError("[" + name_ + "] " + key + ": expected a nonnegative integer, got '" +
                            raw + "'");
    return static_cast<Int>(v);
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) {
      seen_.push_back(key);
      return fallback;
    }
    const std::string raw = text(key);
    if (raw == "true" || raw == "1" || raw == "yes") return true;
    if (raw == "false" || raw == "0" || raw == "no") return false;
    throw ValidationError("[" + name_ + "] " + key + ": expected true or false, got '" + raw + "'");
  }

  std::vector<double> list(const std::string& key) {
    std::vector<double> out;
    std::string raw = text(key);
    std::replace(raw.begin(), raw.end(), ',', ' ');
    std::istringstream in(raw);
    std::string token;
    while (in >> token) out.push_back(parse_number(key, token));
    return out;
  }

  void reject_unknown() const {
    if (!tree_) return;
    for (const auto& [key, _] : *tree_)
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
        throw ValidationError("[" + name_ + "] unknown key '" + key + "'");
  }

 private:
  double parse_number(const std::string& key, const std::string& raw) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(raw, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != raw.size())
      throw ValidationError("[" + name_ + "] " + key + ": expected a number, got '" + raw + "'");
    return v;
  }

  std::string name_;
  const pt::ptree* tree_;
  std::vector<std::string> seen_;
};

const pt::ptree* child(const pt::ptree& root, const std::string& name) {
  auto it = root.find(name);
  return it == root.not_found() ? nullptr : &it->second;
}

void apply_override(pt::ptree& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ValidationError("override '" + assignment + "' lacks '='");
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  std::string section, key;
  if (path.rfind("policy.", 0) == 0) {
    const auto dot = path.find('.', 7);
    if (dot == std::string::npos) throw ValidationError("override '" + path + "' needs policy.NAME.key");
    section = "policy " + path.substr(7, dot - 7);
    key = path.substr(dot + 1);
  } else {
    const auto dot = path.find('.');
    if (dot == std::string::npos) throw ValidationError("override '" + path + "' needs section.key");
    section = path.substr(0, dot);
    key = path.substr(dot + 1);
  }
  const pt::ptree::path_type section_path(section, '\0');
  if (!root.get_child_optional(section_path)) root.push_back({section, pt::ptree()});
  root.get_child(section_path).put(pt::ptree::path_type(key, '\0'), value);
}

std::uint64_t seed_or(Section& s, std::uint64_t master, std::uint64_t stream) {
  return s.integer<std::uint64_t>("seed", derive_seed(master, stream));
}

PolicyConfig parse_policy(Section& s, const std::string& name) {
  PolicyConfig c;
  c.variant = parse_policy_variant(s.text("variant", name));
  c.epsilon = s.number("epsilon", c.epsilon);
  c.known_costs = s.boolean("known_costs", c.known_costs);
  if (s.has("round_budget")) c.round_budget = s.number("round_budget", 0.0);
  else s.text("round_budget");
  c.lambda = s.number("lambda", c.lambda);
  c.oracle = parse_oracle_kind(s.text("oracle", "auto"));
  c.schedule.min_replicates = s.integer<std::size_t>("min_replicates", c.schedule.min_replicates);
  c.schedule.max_replicates = s.integer<std::size_t>("max_replicates", c.schedule.max_replicates);
  c.schedule.epsilon = s.number("schedule_epsilon", c.epsilon);
  c.max_rounds = s.integer<long>("max_rounds", c.max_rounds);
  return c;
}

ExperimentConfig from_tree(const pt::ptree& root) {
  ExperimentConfig cfg;
  for (const auto& [name, _] : root) {
    if (name == "experiment" || name == "graph" || name == "weights" || name == "costs") continue;
    if (name.rfind("policy ", 0) == 0 && name.size() > 7) continue;
    throw ValidationError("unknown section [" + name + "]");
  }

  Section exp("experiment", child(root, "experiment"));
  cfg.budget = exp.number("budget", 0.0);
  cfg.runs = exp.integer<int>("runs", 1);
  cfg.master_seed = exp.integer<std::uint64_t>("seed", 1);
  cfg.output_dir = exp.text("output", cfg.output_dir.string());
  cfg.epsilon = exp.number("epsilon", cfg.epsilon);
  cfg.truth.replicates = exp.integer<std::size_t>("truth_replicates", cfg.truth.replicates);
  cfg.truth.seed = exp.integer<std::uint64_t>("truth_seed", derive_seed(cfg.master_seed, 6));
  exp.reject_unknown();

  Section graph("graph", child(root, "graph"));
  const std::string source = graph.text("source", "complete");
  if (source == "file") {
    cfg.graph.kind = GraphSource::Kind::File;
    cfg.graph.file = graph.required("file");
  } else if (source == "complete") {
    cfg.graph.kind = GraphSource::Kind::Complete;
  } else if (source == "path") {
    cfg.graph.kind = GraphSource::Kind::Path;
  } else if (source == "star") {
    cfg.graph.kind = GraphSource::Kind::Star;
  } else if (source == "random") {
    cfg.graph.kind = GraphSource::Kind::Random;
  } else {
    throw ValidationError("[graph] unknown source '" + source + "'");
  }
  if (cfg.graph.kind != GraphSource::Kind::File) graph.text("file");
  cfg.graph.nodes = graph.integer<NodeId>("nodes", cfg.graph.nodes);
  cfg.graph.density = graph.number("density", cfg.graph.density);
  cfg.graph.seed = seed_or(graph, cfg.master_seed, kGraphStream);
  graph.reject_unknown();

  Section weights("weights", child(root, "weights"));
  const std::string wmodel = weights.text("model", "uniform");
  if (wmodel == "uniform") cfg.weights.kind = WeightModel::Kind::Uniform;
  else if (wmodel == "constant") cfg.weights.kind = WeightModel::Kind::Constant;
  else if (wmodel == "explicit") cfg.weights.kind = WeightModel::Kind::Explicit;
  else throw ValidationError("[weights] unknown model '" + wmodel + "'");
  cfg.weights.low = weights.number("low", cfg.weights.low);
  cfg.weights.high = weights.number("high", cfg.weights.high);
  cfg.weights.value = weights.number("value", cfg.weights.value);
  cfg.weights.values = weights.list("values");
  cfg.weights.seed = seed_or(weights, cfg.master_seed, kWeightStream);
  weights.reject_unknown();

  Section costs("costs", child(root, "costs"));
  const std::string cmodel = costs.text("model", "degree");
  if (cmodel == "degree") cfg.costs.kind = CostModel::Kind::Degree;
  else if (cmodel == "uniform") cfg.costs.kind = CostModel::Kind::Uniform;
  else if (cmodel == "explicit") cfg.costs.kind = CostModel::Kind::Explicit;
  else throw ValidationError("[costs] unknown model '" + cmodel + "'");
  cfg.costs.fixed = costs.number("fixed", cfg.costs.fixed);
  cfg.costs.low = costs.number("low", cfg.costs.low);
  cfg.costs.high = costs.number("high", cfg.costs.high);
  cfg.costs.values = costs.list("values");
  cfg.costs.noise = costs.number("noise", cfg.costs.noise);
  cfg.costs.seed = seed_or(costs, cfg.master_seed, kCostStream);
  costs.reject_unknown();

  for (const auto& [name, tree] : root) {
    if (name.rfind("policy ", 0) != 0) continue;
    const std::string policy_name = name.substr(7);
    Section s(name, &tree);
    PolicyEntry entry{policy_name, parse_policy(s, policy_name)};
    s.reject_unknown();
    cfg.policies.push_back(std::move(entry));
  }
  cfg.validate();
  return cfg;
}

pt::ptree read_tree(std::istream& in) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.line(), e.message());
  }
  return root;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(budget > 0.0)) throw ValidationError("[experiment] budget must be positive");
  if (runs < 1) throw ValidationError("[experiment] runs must be at least 1");
  if (!(epsilon >= 0.0)) throw ValidationError("[experiment] epsilon must be nonnegative");
  if (truth.replicates < 1) throw ValidationError("[experiment] truth_replicates must be positive");
  if (policies.empty()) throw ValidationError("no [policy NAME] section");
  if (graph.kind == GraphSource::Kind::File && !std::filesystem::exists(graph.file))
    throw ValidationError("[graph] file '" + graph.file.string() + "' does not exist");
  if (graph.kind != GraphSource::Kind::File && graph.nodes < 1)
    throw ValidationError("[graph] nodes must be at least 1");
  if (weights.kind == WeightModel::Kind::Uniform &&
      !(0.0 <= weights.low && weights.low <= weights.high && weights.high <= 1.0))
    throw ValidationError("[weights] need 0 <= low <= high <= 1");
  if (costs.kind == CostModel::Kind::Uniform &&
      !(0.0 <= costs.low && costs.low <= costs.high && costs.high <= 1.0))
    throw ValidationError("[costs] need 0 <= low <= high <= 1");
  if (!(costs.fixed > 0.0 && costs.fixed <= 1.0))
    throw ValidationError("[costs] fixed must lie in (0, 1]");
  for (std::size_t p = 0; p < policies.size(); ++p) {
    policies[p].config.validate();
    for (std::size_t q = 0; q < p; ++q)
      if (policies[q].name == policies[p].name)
        throw ValidationError("duplicate policy name '" + policies[p].name + "'");
  }
}

ExperimentConfig parse_experiment_config(std::istream& in, const std::vector<std::string>& overrides) {
  pt::ptree root = read_tree(in);
  for (const auto& o : overrides) apply_override(root, o);
  return from_tree(root);
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  return parse_experiment_config(in, overrides);
}

std::string preset_text(const std::string& name) {
  if (name == "appendix-i") {
    return R"([experiment]
budget = 20000
runs = 10
seed = 2021
output = boim-appendix-i
epsilon = 0.1
truth_replicates = 100000

[graph]
source = complete
nodes = 10

[weights]
model = uniform
low = 0
high = 0.1

[costs]
model = uniform
low = 0
high = 1
fixed = 1

[policy cucb]
variant = cucb
known_costs = true
max_replicates = 1000

[policy reg2]
variant = regularized
lambda = 2
known_costs = true
max_replicates = 1000

[policy reg3]
variant = regularized
lambda = 3
known_costs = true
max_replicates = 1000

[policy reg4]
variant = regularized
lambda = 4
known_costs = true
max_replicates = 1000
)";
  }
  if (name == "facebook") {
    return R"([experiment]
budget = 20000
runs = 10
seed = 2021
output = boim-facebook
epsilon = 0.1
truth_replicates = 2000

[graph]
source = file
file = facebook.edges

[weights]
model = uniform
low = 0
high = 0.1

[costs]
model = degree
fixed = 1

[policy cucb]
variant = cucb
min_replicates = 200
max_replicates = 200
max_rounds = 10000

[policy cucb_plus]
variant = cucb_plus
min_replicates = 200
max_replicates = 200
max_rounds = 10000
)";
  }
  throw ValidationError("unknown preset '" + name + "' (expected appendix-i or facebook)");
}

ExperimentConfig experiment_preset(const std::string& name, const std::vector<std::string>& overrides) {
  std::istringstream in(preset_text(name));
  return parse_experiment_config(in, overrides);
}

DirectedGraph build_graph(const GraphSource& source) {
  switch (source.kind) {
    case GraphSource::Kind::File: return load_edge_list_file(source.file);
    case GraphSource::Kind::Complete: return complete_graph(source.nodes);
    case GraphSource::Kind::Path: return path_graph(source.nodes);
    case GraphSource::Kind::Star: return star_graph(source.nodes - 1);
    case GraphSource::Kind::Random: {
      Rng rng(source.seed);
      return random_graph(source.nodes, source.density, rng);
    }
  }
  throw ValidationError("unknown graph source");
}

WeightVector build_weights(const WeightModel& model, const DirectedGraph& g) {
  WeightVector w(g.edge_count());
  switch (model.kind) {
    case WeightModel::Kind::Uniform: {
      Rng rng(model.seed);
      for (EdgeId e = 0; e < g.edge_count(); ++e)
        w[e] = model.low + (model.high - model.low) * uniform01(rng);
      break;
    }
    case WeightModel::Kind::Constant: w.setConstant(model.value); break;
    case WeightModel::Kind::Explicit:
      if (model.values.size() != static_cast<std::size_t>(g.edge_count()))
        throw ValidationError("[weights] values must list one weight per edge");
      w = Eigen::Map<const Eigen::VectorXd>(model.values.data(), g.edge_count());
      break;
  }
  validate_weights(g, w);
  return w;
}

CostVector build_costs(const CostModel& model, const DirectedGraph& g) {
  CostVector c;
  switch (model.kind) {
    case CostModel::Kind::Degree: c = degree_proportional_costs(g, model.fixed); break;
    case CostModel::Kind::Uniform: {
      Rng rng(model.seed);
      c.node.resize(g.node_count());
      for (NodeId i = 0; i < g.node_count(); ++i)
        c.node[i] = model.low + (model.high - model.low) * uniform01(rng);
      c.fixed = model.fixed;
      break;
    }
    case CostModel::Kind::Explicit:
      if (model.values.size() != static_cast<std::size_t>(g.node_count()))
        throw ValidationError("[costs] values must list one cost per node");
      c.node = Eigen::Map<const Eigen::VectorXd>(model.values.data(), g.node_count());
      c.fixed = model.fixed;
      break;
  }
  validate_costs(g, c);
  return c;
}

std::uint64_t policy_seed(std::uint64_t master, std::size_t policy, int run) {
  return derive_seed(master, kPolicyStream, policy, static_cast<std::uint64_t>(run));
}

std::uint64_t environment_seed(std::uint64_t master, int run) {
  return derive_seed(master, kEnvironmentStream, static_cast<std::uint64_t>(run));
}

double PolicyResult::acceptance_rate() const {
  std::size_t accepted = 0, total = 0;
  for (const auto& r : runs) {
    accepted += r.accepted;
    total += r.accepted + r.replaced;
  }
  return total == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(total);
}

unsigned worker_count() {
  if (const char* env = std::getenv("BOIM_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool write_outputs) {
  config.validate();
  const DirectedGraph g = build_graph(config.graph);
  const WeightVector w = build_weights(config.weights, g);
  const CostVector c = build_costs(config.costs, g);
  const GapEvaluator evaluator(g, w, c, config.epsilon, config.truth);

  ExperimentResult result;
  result.node_count = g.node_count();
  result.edge_count = g.edge_count();
  result.lambda = evaluator.lambda_star();
  result.checkpoints = budget_checkpoints(config.budget);
  for (const auto& p : config.policies) {
    result.policies.push_back({p.name, p.config, {}, {}});
    result.policies.back().runs.resize(config.runs);
  }
  if (write_outputs) std::filesystem::create_directories(config.output_dir);

  const std::size_t cells = config.policies.size() * static_cast<std::size_t>(config.runs);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t cell = next++; cell < cells; cell = next++) {
      const std::size_t p = cell / config.runs;
      const int run = static_cast<int>(cell % config.runs);
      try {
        PolicyConfig pc = config.policies[p].config;
        pc.seed = policy_seed(config.master_seed, p, run);
        Environment env(g, w, c, config.costs.noise, environment_seed(config.master_seed, run));
        const EpisodeTrace trace = run_episode(env, pc, config.budget);
        const std::vector<double> gaps = trace_gaps(trace, evaluator);

        RunSummary& s = result.policies[p].runs[run];
        s.run_id = run;
        s.rounds = trace.rounds.size();
        s.counted_rounds = trace.counted_rounds();
        s.exhausted = trace.exhausted;
        for (std::size_t k = 0; k < trace.counted_rounds(); ++k) {
          const RoundLog& r = trace.rounds[k];
          s.accepted += r.condition == ConditionOutcome::Accepted;
          s.replaced += r.condition == ConditionOutcome::Replaced;
          s.augmented += r.augmented.has_value();
        }
        const auto curve = regret_curve(trace, gaps);
        s.final_regret = curve.empty() ? 0.0 : curve.back().cumulative_gap;
        s.curve = curve_at(curve, result.checkpoints);
        if (write_outputs) {
          std::ofstream out(config.output_dir /
                            (config.policies[p].name + "_run" + std::to_string(run) + ".csv"));
          write_trace_csv_header(out);
          write_trace_csv(out, run, trace, gaps);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned workers = std::min<std::size_t>(worker_count(), cells);
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < workers; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  for (auto& pr : result.policies) {
    std::vector<std::vector<double>> curves;
    for (const auto& r : pr.runs) curves.push_back(r.curve);
    pr.mean_curve = average_series(curves);
  }

  if (write_outputs) {
    std::ofstream curves(config.output_dir / "curves.csv");
    curves << std::setprecision(std::numeric_limits<double>::max_digits10);
    curves << "checkpoint,budget";
    for (const auto& pr : result.policies) curves << ',' << pr.name;
    curves << '\n';
    for (std::size_t k = 0; k < result.checkpoints.size(); ++k) {
      curves << k + 1 << ',' << result.checkpoints[k];
      for (const auto& pr : result.policies) curves << ',' << pr.mean_curve[k];
      curves << '\n';
    }
    std::ofstream summary(config.output_dir / "summary.csv");
    summary << std::setprecision(std::numeric_limits<double>::max_digits10);
    summary << "policy,variant,runs,mean_rounds,final_regret,regret_per_budget_10pct,"
               "regret_per_budget_final,acceptance_rate,lambda_star,lambda_provenance,nodes,edges\n";
    for (const auto& pr : result.policies) {
      double rounds = 0.0;
      for (const auto& r : pr.runs) rounds += static_cast<double>(r.rounds);
      summary << pr.name << ',' << to_string(pr.config.variant) << ',' << pr.runs.size() << ','
              << rounds / pr.runs.size() << ',' << pr.mean_curve.back() << ','
              << pr.mean_curve[9] / result.checkpoints[9] << ','
              << pr.mean_curve.back() / result.checkpoints.back() << ',' << pr.acceptance_rate()
              << ',' << result.lambda.value << ',' << to_string(result.lambda.provenance) << ','
              << result.node_count << ',' << result.edge_count << '\n';
    }
  }
  return result;
}

void print_summary(std::ostream& out, const ExperimentResult& result) {
  out << "graph: |V|=" << result.node_count << " |E|=" << result.edge_count << "  lambda*="
      << result.lambda.value << " (" << to_string(result.lambda.provenance) << ")\n";
  out << std::left << std::setw(14) << "policy" << std::setw(12) << "variant" << std::right
      << std::setw(12) << "rounds" << std::setw(16) << "regret(B)" << std::setw(14) << "R/B @10%"
      << std::setw(14) << "R/B @100%" << std::setw(12) << "accept" << '\n';
  for (const auto& pr : result.policies) {
    double rounds = 0.0;
    for (const auto& r : pr.runs) rounds += static_cast<double>(r.rounds);
    const bool has_condition = pr.config.variant != PolicyVariant::Cucb &&
                               pr.config.variant != PolicyVariant::Regularized;
    std::ostringstream accept;
    if (has_condition) accept << std::fixed << std::setprecision(3) << pr.acceptance_rate();
    else accept << "-";
    out << std::left << std::setw(14) << pr.name << std::setw(12) << to_string(pr.config.variant)
        << std::right << std::fixed << std::setprecision(1) << std::setw(12)
        << rounds / pr.runs.size() << std::setprecision(3) << std::setw(16) << pr.mean_curve.back()
        << std::setprecision(5) << std::setw(14) << pr.mean_curve[9] / result.checkpoints[9]
        << std::setw(14) << pr.mean_curve.back() / result.checkpoints.back() << std::setw(12)
        << accept.str() << '\n';
    out.unsetf(std::ios::floatfield);
  }
}

}  // namespace boim
