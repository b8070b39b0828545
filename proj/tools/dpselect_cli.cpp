#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dpselect/analysis.hpp"
#include "dpselect/bandit.hpp"
#include "dpselect/harness.hpp"
#include "dpselect/heuristics.hpp"
#include "dpselect/mechanisms.hpp"
#include "dpselect/scenarios.hpp"

namespace {

using json = nlohmann::json;
using namespace dpselect;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::vector<std::string> mechanisms;
  std::string eps_list;
  std::string scenario;
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
};

std::map<std::string, std::string> load_config(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  return harness::parse_config_file(in);
}

// Precedence: explicit flag > config file > environment / built-in default.
std::uint64_t resolve_seed(const CommonOptions& options,
                           const std::map<std::string, std::string>& config) {
  if (options.seed) return *options.seed;
  if (auto it = config.find("seed"); it != config.end()) {
    return std::stoull(it->second);
  }
  if (const char* env = std::getenv("DPSELECT_SEED")) {
    return std::stoull(env);
  }
  return 0;
}

std::size_t resolve_trials(const CommonOptions& options,
                           const std::map<std::string, std::string>& config,
                           std::size_t fallback) {
  if (options.trials) return *options.trials;
  if (auto it = config.find("trials"); it != config.end()) {
    return std::stoull(it->second);
  }
  return fallback;
}

std::string resolve_string(const std::string& flag_value,
                           const std::map<std::string, std::string>& config,
                           const std::string& key,
                           const std::string& fallback) {
  if (!flag_value.empty()) return flag_value;
  if (auto it = config.find(key); it != config.end()) return it->second;
  return fallback;
}

std::vector<double> resolve_epsilons(
    const CommonOptions& options,
    const std::map<std::string, std::string>& config) {
  std::string text = options.eps_list;
  if (text.empty()) {
    if (auto it = config.find("eps"); it != config.end()) text = it->second;
  }
  if (text.empty()) return harness::default_epsilon_grid();
  const auto values = harness::parse_double_list(text);
  if (values.empty()) {
    throw std::invalid_argument("empty --eps list");
  }
  return values;
}

std::vector<MechanismSpec> resolve_mechanisms(
    const CommonOptions& options,
    const std::map<std::string, std::string>& config,
    const std::string& fallback) {
  std::vector<std::string> names;
  for (const auto& entry : options.mechanisms) {
    std::stringstream stream(entry);
    std::string field;
    while (std::getline(stream, field, ',')) {
      if (!field.empty()) names.push_back(field);
    }
  }
  if (names.empty()) {
    if (auto it = config.find("mechanism"); it != config.end()) {
      std::stringstream stream(it->second);
      std::string field;
      while (std::getline(stream, field, ',')) {
        if (!field.empty()) names.push_back(field);
      }
    }
  }
  if (names.empty() && !fallback.empty()) names.push_back(fallback);
  if (names.empty()) {
    throw std::invalid_argument("no mechanism given (--mechanism)");
  }
  std::vector<MechanismSpec> specs;
  for (const auto& name : names) {
    MechanismSpec spec;
    spec.kind = parse_mechanism(name);
    specs.push_back(spec);
  }
  return specs;
}

// Output sink: file when --out is set, stdout otherwise.
class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) {
        throw std::runtime_error("cannot open output file: " + path);
      }
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void emit_table(const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows,
                const std::string& format, std::ostream& out) {
  if (format == "json") {
    json array = json::array();
    for (const auto& row : rows) {
      json object;
      for (std::size_t i = 0; i < header.size(); ++i) {
        object[header[i]] = row[i];
      }
      array.push_back(object);
    }
    out << array.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << header[i] << (i + 1 < header.size() ? ',' : '\n');
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << (i + 1 < row.size() ? ',' : '\n');
    }
  }
}

std::string format_double(double value) {
  std::ostringstream out;
  out << std::setprecision(17) << value;
  return out.str();
}

int run_select(const CommonOptions& options) {
  const auto config = load_config(options.config_path);
  const std::uint64_t seed = resolve_seed(options, config);
  const auto epsilons = resolve_epsilons(options, config);
  auto specs = resolve_mechanisms(options, config, "rnm");
  const std::string scenario_name =
      resolve_string(options.scenario, config, "scenario", "s1");

  auto scenario = scenarios::parse_scenario(scenario_name);
  scenario.trials = std::max<std::size_t>(resolve_trials(options, config, 2), 2);
  const auto problems = scenarios::realize_scenario(scenario, seed);
  const SelectionProblem& problem = problems.front();

  std::vector<std::vector<std::string>> rows;
  for (auto& spec : specs) {
    spec.epsilon = epsilons.front();
    RngStream rng(seed, mix_ids(1, 1));
    const auto outcome = mechanisms::run_mechanism(problem, spec, rng);
    std::string branch = "-";
    if (outcome.branch) {
      branch = *outcome.branch == GemBranch::mgem ? "mgem" : "gem";
    }
    rows.push_back({scenario.name(), mechanism_name(spec.kind),
                    format_double(spec.epsilon),
                    std::to_string(outcome.chosen_index),
                    format_double(problem.scores[outcome.chosen_index]),
                    std::to_string(problem.optimal_index), branch,
                    outcome.iterations ? std::to_string(*outcome.iterations)
                                       : "-",
                    std::to_string(seed)});
  }
  OutputSink sink(options.out_path);
  emit_table({"scenario", "mechanism", "epsilon", "chosen_index",
              "chosen_score", "optimal_index", "branch", "iterations", "seed"},
             rows, options.format, sink.stream());
  return kExitOk;
}

int run_sweep_command(const CommonOptions& options) {
  const auto config = load_config(options.config_path);
  harness::SweepConfig sweep;
  sweep.seed = resolve_seed(options, config);
  sweep.trials = resolve_trials(options, config, 1000);
  sweep.epsilons = resolve_epsilons(options, config);
  sweep.mechanisms = resolve_mechanisms(options, config, "");
  sweep.scenario = scenarios::parse_scenario(
      resolve_string(options.scenario, config, "scenario", "s1"));

  const auto rows = harness::run_sweep(sweep);
  OutputSink sink(resolve_string(options.out_path, config, "out", ""));
  if (options.format == "json") {
    std::vector<std::vector<std::string>> table;
    for (const auto& row : rows) {
      table.push_back({row.scenario, row.mechanism, format_double(row.epsilon),
                       std::to_string(row.trials), format_double(row.mse),
                       format_double(row.ci_low), format_double(row.ci_high),
                       std::to_string(row.seed)});
    }
    emit_table({"scenario", "mechanism", "epsilon", "trials", "mse", "ci_low",
                "ci_high", "seed"},
               table, "json", sink.stream());
  } else {
    harness::write_sweep_csv(rows, sink.stream());
  }
  return kExitOk;
}

struct BanditOptions {
  std::string policy = "ucb";
  std::size_t horizon = 5000;
  std::size_t t_shift = 3000;
  std::size_t window = 200;
  double eps_mean = 1.0;
  double eps_select = 1.0;
  double eps_quantile = 1.0;
  double krr_eps = 4.0;
  double alpha = 1.4142135623730951;
};

int run_bandit_command(const CommonOptions& options,
                       const BanditOptions& bandit_options) {
  const auto config = load_config(options.config_path);
  const std::uint64_t seed = resolve_seed(options, config);

  bandit::BanditConfig bandit_config;
  bandit_config.horizon = bandit_options.horizon;
  bandit_config.t_shift = bandit_options.t_shift;
  bandit_config.window = bandit_options.window;
  bandit_config.eps_mean = bandit_options.eps_mean;
  bandit_config.eps_select = bandit_options.eps_select;
  bandit_config.eps_quantile = bandit_options.eps_quantile;
  bandit_config.krr_eps = bandit_options.krr_eps;
  bandit_config.ucb_alpha = bandit_options.alpha;

  bandit::BanditPolicy policy;
  if (bandit_options.policy == "ucb") {
    policy = bandit::BanditPolicy::ucb();
  } else {
    policy =
        bandit::BanditPolicy::with_mechanism(parse_mechanism(bandit_options.policy));
  }

  const auto trajectory = bandit::run_bandit(bandit_config, policy, seed);
  OutputSink sink(options.out_path);
  bandit::write_trajectory_csv(trajectory, sink.stream());
  return kExitOk;
}

struct VerifyOptions {
  std::string instance = "laplace-rnmh";
  std::size_t k = 3;
  double gamma = 0.5;
  double epsilon = 1.0;
};

int run_verify_command(const CommonOptions& options,
                       const VerifyOptions& verify_options) {
  const auto config = load_config(options.config_path);
  const std::uint64_t seed = resolve_seed(options, config);
  const std::size_t trials = resolve_trials(options, config, 1'000'000);

  analysis::CounterexampleInstance instance;
  if (verify_options.instance == "laplace-rnmh") {
    instance = analysis::laplace_rnmh_instance(verify_options.k,
                                               verify_options.epsilon);
  } else if (verify_options.instance == "exponential-rnmh") {
    instance = analysis::exponential_rnmh_instance(verify_options.epsilon);
  } else if (verify_options.instance == "rs-exponential") {
    instance = analysis::rs_exponential_instance(
        verify_options.k, verify_options.gamma, verify_options.epsilon);
  } else {
    throw std::invalid_argument(
        "unknown instance (expected laplace-rnmh, exponential-rnmh, or "
        "rs-exponential)");
  }

  RngStream rng(seed, 1);
  const auto report =
      analysis::verify_dp_ratio(instance.mechanism, instance.d1, instance.d2,
                                instance.target_index, trials, rng);

  std::vector<std::vector<std::string>> rows{
      {instance.name, std::to_string(trials), format_double(report.p1),
       format_double(report.p2), format_double(report.empirical_ratio),
       format_double(report.ci_low), format_double(report.ci_high),
       format_double(instance.analytic_p1), format_double(instance.analytic_p2),
       format_double(instance.analytic_ratio),
       report.low_counts ? "true" : "false"}};
  OutputSink sink(options.out_path);
  emit_table({"instance", "trials", "p1", "p2", "ratio", "ci_low", "ci_high",
              "analytic_p1", "analytic_p2", "analytic_ratio", "low_counts"},
             rows, options.format, sink.stream());
  return kExitOk;
}

struct CorrelateOptions {
  std::string input_path;
  double epsilon = 1.0;
  double beta = 0.05;
  std::size_t buckets = 5;
  std::size_t top_k = 500;
};

std::vector<std::string> correlate_row(const std::string& name,
                                       const SelectionProblem& problem,
                                       const CorrelateOptions& opts) {
  heuristics::CorrelationReport report;
  if (problem.size() >= 2) {
    report = heuristics::correlation_report(problem, opts.buckets);
  }
  const auto flags =
      heuristics::utility_bound_flags(problem, opts.epsilon, opts.beta);
  return {name,
          std::to_string(problem.size()),
          format_double(report.pearson),
          format_double(report.spearman),
          format_double(report.weighted),
          flags.gem_worse_than_rnm ? "true" : "false",
          flags.gem_worse_than_random ? "true" : "false"};
}

int run_correlate_command(const CommonOptions& options,
                          const CorrelateOptions& correlate_options) {
  const auto config = load_config(options.config_path);
  const std::uint64_t seed = resolve_seed(options, config);

  std::vector<std::vector<std::string>> rows;
  if (!correlate_options.input_path.empty()) {
    std::ifstream in(correlate_options.input_path);
    if (!in) {
      throw std::runtime_error("cannot open score file: " +
                               correlate_options.input_path);
    }
    const auto ingest =
        harness::ingest_scores(harness::read_score_matrix(in),
                               correlate_options.top_k);
    for (const auto& warning : ingest.warnings) {
      std::cerr << "warning: " << warning << '\n';
    }
    for (std::size_t u = 0; u < ingest.problems.size(); ++u) {
      rows.push_back(correlate_row(ingest.user_ids[u], ingest.problems[u],
                                   correlate_options));
    }
  } else {
    const std::string scenario_name =
        resolve_string(options.scenario, config, "scenario", "s1");
    auto scenario = scenarios::parse_scenario(scenario_name);
    scenario.trials =
        std::max<std::size_t>(resolve_trials(options, config, 200), 2);
    const auto problems = scenarios::realize_scenario(scenario, seed);
    const std::size_t limit = std::min<std::size_t>(problems.size(), 32);
    for (std::size_t i = 0; i < limit; ++i) {
      rows.push_back(correlate_row(scenario.name() + "#" + std::to_string(i),
                                   problems[i], correlate_options));
    }
  }
  OutputSink sink(options.out_path);
  emit_table({"problem", "candidates", "pearson", "spearman", "weighted",
              "gem_worse_than_rnm", "gem_worse_than_random"},
             rows, options.format, sink.stream());
  return kExitOk;
}

struct IngestOptions {
  std::string input_path;
  std::size_t top_k = 500;
};

int run_ingest_command(const CommonOptions& options,
                       const IngestOptions& ingest_options) {
  std::ifstream in(ingest_options.input_path);
  if (!in) {
    throw std::runtime_error("cannot open score file: " +
                             ingest_options.input_path);
  }
  const auto result = harness::ingest_scores(harness::read_score_matrix(in),
                                             ingest_options.top_k);
  for (const auto& warning : result.warnings) {
    std::cerr << "warning: " << warning << '\n';
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t u = 0; u < result.problems.size(); ++u) {
    const auto& problem = result.problems[u];
    const double rho =
        problem.size() >= 2
            ? heuristics::spearman(problem.scores, problem.sensitivities)
            : 0.0;
    rows.push_back(
        {result.user_ids[u], std::to_string(problem.size()),
         format_double(problem.scores[problem.optimal_index]),
         format_double(problem.sensitivities[problem.optimal_index]),
         format_double(rho)});
  }
  OutputSink sink(options.out_path);
  emit_table({"user_id", "candidates", "best_score", "best_sensitivity",
              "spearman"},
             rows, options.format, sink.stream());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private selection with heterogeneous "
               "sensitivities: mechanisms, scenario sweeps, adversarial "
               "verification, and a bandit simulation"};
  app.require_subcommand(1);

  CommonOptions common;
  BanditOptions bandit_options;
  VerifyOptions verify_options;
  CorrelateOptions correlate_options;
  IngestOptions ingest_options;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", common.seed, "master seed (env DPSELECT_SEED)");
    cmd->add_option("--trials", common.trials, "number of trials");
    cmd->add_option("--mechanism", common.mechanisms,
                    "mechanism name, repeatable or comma-separated");
    cmd->add_option("--eps", common.eps_list, "comma-separated epsilon list");
    cmd->add_option("--scenario", common.scenario,
                    "s1..s6, increasing:<t>, polarized:<sigma>");
    cmd->add_option("--config", common.config_path, "key=value config file");
    cmd->add_option("--out", common.out_path, "output path (default stdout)");
    cmd->add_option("--format", common.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* select_cmd =
      app.add_subcommand("select", "run one mechanism once and report it");
  add_common(select_cmd);

  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "mse over scenario x mechanism x epsilon grid");
  add_common(sweep_cmd);

  CLI::App* bandit_cmd = app.add_subcommand(
      "bandit", "two-armed distribution-shift simulation, trajectory csv");
  add_common(bandit_cmd);
  bandit_cmd->add_option("--policy", bandit_options.policy,
                         "ucb or a mechanism name");
  bandit_cmd->add_option("--horizon", bandit_options.horizon, "steps T");
  bandit_cmd->add_option("--t-shift", bandit_options.t_shift, "shift step");
  bandit_cmd->add_option("--window", bandit_options.window,
                         "observations per quantile refresh");
  bandit_cmd->add_option("--eps-mean", bandit_options.eps_mean,
                         "continual counter budget");
  bandit_cmd->add_option("--eps-select", bandit_options.eps_select,
                         "per-step selection budget");
  bandit_cmd->add_option("--eps-quantile", bandit_options.eps_quantile,
                         "budget per quantile pair");
  bandit_cmd->add_option("--krr-eps", bandit_options.krr_eps,
                         "selection budget for the krr policy");
  bandit_cmd->add_option("--alpha", bandit_options.alpha, "ucb optimism");

  CLI::App* verify_cmd = app.add_subcommand(
      "verify-dp", "empirical output-probability ratios on adversarial pairs");
  add_common(verify_cmd);
  verify_cmd->add_option(
      "--instance", verify_options.instance,
      "laplace-rnmh | exponential-rnmh | rs-exponential");
  verify_cmd->add_option("--k", verify_options.k, "candidate count");
  verify_cmd->add_option("--gamma", verify_options.gamma, "stopping rate");
  verify_cmd->add_option("--epsilon", verify_options.epsilon,
                         "mechanism budget");

  CLI::App* correlate_cmd = app.add_subcommand(
      "correlate", "correlation report and utility-bound flags");
  add_common(correlate_cmd);
  correlate_cmd->add_option("--in", correlate_options.input_path,
                            "score matrix csv instead of a scenario");
  correlate_cmd->add_option("--epsilon", correlate_options.epsilon,
                            "budget for the utility-bound flags");
  correlate_cmd->add_option("--beta", correlate_options.beta,
                            "failure parameter for the flags");
  correlate_cmd->add_option("--buckets", correlate_options.buckets,
                            "weighted-correlation buckets");
  correlate_cmd->add_option("--top-k", correlate_options.top_k,
                            "candidates per user when reading a file");

  CLI::App* ingest_cmd = app.add_subcommand(
      "ingest", "build per-user problems from a score matrix");
  add_common(ingest_cmd);
  ingest_cmd->add_option("--in", ingest_options.input_path, "score matrix csv")
      ->required();
  ingest_cmd->add_option("--top-k", ingest_options.top_k,
                         "candidates per user");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (select_cmd->parsed()) return run_select(common);
    if (sweep_cmd->parsed()) return run_sweep_command(common);
    if (bandit_cmd->parsed()) return run_bandit_command(common, bandit_options);
    if (verify_cmd->parsed()) return run_verify_command(common, verify_options);
    if (correlate_cmd->parsed()) {
      return run_correlate_command(common, correlate_options);
    }
    if (ingest_cmd->parsed()) return run_ingest_command(common, ingest_options);
    std::cerr << "error: no subcommand\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::runtime_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIoError;
  }
}
