#include "dpselect/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "dpselect/mechanisms.hpp"

namespace dpselect::harness {

namespace {

MseEstimate summarize_gaps(const std::vector<double>& squared_gaps) {
  MseEstimate estimate;
  estimate.trials = squared_gaps.size();
  const double n = static_cast<double>(squared_gaps.size());
  const double mean =
      std::accumulate(squared_gaps.begin(), squared_gaps.end(), 0.0) / n;
  double variance = 0.0;
  for (double g : squared_gaps) variance += (g - mean) * (g - mean);
  variance = squared_gaps.size() > 1 ? variance / (n - 1.0) : 0.0;
  const double half = 1.959964 * std::sqrt(variance / n);
  estimate.mse = mean;
  estimate.ci_low = mean - half;
  estimate.ci_high = mean + half;
  return estimate;
}

}  // namespace

MseEstimate evaluate_mse(const SelectionProblem& problem,
                         const MechanismSpec& mechanism, std::size_t trials,
                         RngStream& rng) {
  return evaluate_mse(std::vector<SelectionProblem>{problem}, mechanism,
                      trials, rng);
}

MseEstimate evaluate_mse(const std::vector<SelectionProblem>& problems,
                         const MechanismSpec& mechanism, std::size_t trials,
                         RngStream& rng) {
  if (problems.empty() || trials == 0) {
    throw std::invalid_argument("evaluate_mse: need problems and trials >= 1");
  }
  std::vector<double> squared_gaps(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const SelectionProblem& problem = problems[i % problems.size()];
    const std::size_t chosen =
        mechanisms::run_mechanism(problem, mechanism, rng).chosen_index;
    const double gap =
        problem.scores[problem.optimal_index] - problem.scores[chosen];
    squared_gaps[i] = gap * gap;
  }
  return summarize_gaps(squared_gaps);
}

MseEstimate evaluate_mse(const scenarios::TrialSet& trial_set,
                         const MechanismSpec& mechanism, RngStream& rng) {
  std::vector<double> squared_gaps(trial_set.trials());
  for (std::size_t i = 0; i < trial_set.trials(); ++i) {
    const SelectionProblem problem = trial_set.trial_problem(i);
    const std::size_t chosen =
        mechanisms::run_mechanism(problem, mechanism, rng).chosen_index;
    const double gap =
        problem.scores[problem.optimal_index] - problem.scores[chosen];
    squared_gaps[i] = gap * gap;
  }
  return summarize_gaps(squared_gaps);
}

double log_score_ratio(const MechanismSpec& mech_a, const MechanismSpec& mech_b,
                       const SelectionProblem& problem, std::size_t trials,
                       RngStream& rng) {
  if (trials == 0) {
    throw std::invalid_argument("log_score_ratio: trials must be >= 1");
  }
  RngStream stream_a = rng.substream(1);
  RngStream stream_b = rng.substream(2);
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    sum_a += problem.scores[
        mechanisms::run_mechanism(problem, mech_a, stream_a).chosen_index];
    sum_b += problem.scores[
        mechanisms::run_mechanism(problem, mech_b, stream_b).chosen_index];
  }
  if (!(sum_a > 0.0) || !(sum_b > 0.0)) {
    throw std::domain_error(
        "log_score_ratio: mean selected scores must be positive; shift the "
        "scores to a positive range first");
  }
  return std::log(sum_a / sum_b);
}

ScoreMatrixFile read_score_matrix(std::istream& in) {
  ScoreMatrixFile file;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("score matrix: empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "user_id,item_id,score") {
    throw std::runtime_error(
        "score matrix: expected header 'user_id,item_id,score'");
  }

  std::map<std::string, std::size_t> user_index;
  std::map<std::string, std::size_t> item_index;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto first = line.find(',');
    const auto second = first == std::string::npos
                            ? std::string::npos
                            : line.find(',', first + 1);
    if (first == std::string::npos || second == std::string::npos) {
      throw std::runtime_error("score matrix: malformed line " +
                               std::to_string(line_number));
    }
    const std::string user = line.substr(0, first);
    const std::string item = line.substr(first + 1, second - first - 1);
    const std::string score_text = line.substr(second + 1);
    if (user.empty() || item.empty()) {
      throw std::runtime_error("score matrix: malformed line " +
                               std::to_string(line_number));
    }

    auto [user_it, user_new] = user_index.try_emplace(user, file.user_ids.size());
    if (user_new) {
      file.user_ids.push_back(user);
      file.entries.emplace_back();
    }
    if (score_text.empty()) continue;  // missing score: drop the row

    std::size_t consumed = 0;
    double score = 0.0;
    try {
      score = std::stod(score_text, &consumed);
    } catch (const std::exception&) {
      throw std::runtime_error("score matrix: bad score on line " +
                               std::to_string(line_number));
    }
    if (consumed != score_text.size() || !std::isfinite(score)) {
      throw std::runtime_error("score matrix: bad score on line " +
                               std::to_string(line_number));
    }

    auto [item_it, item_new] = item_index.try_emplace(item, file.item_ids.size());
    if (item_new) file.item_ids.push_back(item);
    file.entries[user_it->second].emplace_back(item_it->second, score);
  }
  return file;
}

IngestResult ingest_scores(const ScoreMatrixFile& file, std::size_t top_k) {
  if (top_k == 0) {
    throw std::invalid_argument("ingest_scores: top_k must be >= 1");
  }
  const std::size_t item_count = file.item_ids.size();
  std::vector<std::vector<double>> per_item_scores(item_count);
  for (const auto& user_entries : file.entries) {
    for (const auto& [item, score] : user_entries) {
      per_item_scores[item].push_back(score);
    }
  }

  IngestResult result;
  result.item_sensitivities.resize(item_count, kSensitivityFloor);
  for (std::size_t i = 0; i < item_count; ++i) {
    if (per_item_scores[i].empty()) continue;
    const double lo = scenarios::empirical_quantile(per_item_scores[i], 0.01);
    const double hi = scenarios::empirical_quantile(per_item_scores[i], 0.99);
    result.item_sensitivities[i] = std::max(hi - lo, kSensitivityFloor);
  }

  for (std::size_t u = 0; u < file.user_ids.size(); ++u) {
    auto entries = file.entries[u];
    if (entries.empty()) {
      result.warnings.push_back("user " + file.user_ids[u] +
                                " has no scored items; skipped");
      continue;
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
              });
    if (entries.size() > top_k) entries.resize(top_k);

    std::vector<double> scores;
    std::vector<double> sens;
    std::vector<std::size_t> items;
    scores.reserve(entries.size());
    for (const auto& [item, score] : entries) {
      scores.push_back(score);
      sens.push_back(result.item_sensitivities[item]);
      items.push_back(item);
    }
    result.user_ids.push_back(file.user_ids[u]);
    result.problems.push_back(make_problem(std::move(scores), std::move(sens)));
    result.item_indices.push_back(std::move(items));
  }
  return result;
}

std::vector<double> default_epsilon_grid(std::size_t points) {
  if (points < 2) {
    throw std::invalid_argument("default_epsilon_grid: need >= 2 points");
  }
  std::vector<double> grid(points);
  const double lo = std::log(0.01);
  const double hi = std::log(16.0);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(points - 1));
  }
  return grid;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  if (config.mechanisms.empty() || config.epsilons.empty()) {
    throw std::invalid_argument(
        "run_sweep: mechanism and epsilon lists must be nonempty");
  }
  scenarios::ScenarioSpec scenario = config.scenario;
  scenario.trials = config.trials;
  const std::vector<SelectionProblem> problems =
      scenarios::realize_scenario(scenario, config.seed);

  std::vector<SweepRow> rows;
  rows.reserve(config.mechanisms.size() * config.epsilons.size());
  for (std::size_t m = 0; m < config.mechanisms.size(); ++m) {
    for (std::size_t e = 0; e < config.epsilons.size(); ++e) {
      const MechanismSpec spec =
          config.mechanisms[m].with_epsilon(config.epsilons[e]);
      RngStream cell_rng(config.seed, mix_ids(m + 1, e + 1));
      const MseEstimate estimate =
          evaluate_mse(problems, spec, config.trials, cell_rng);
      SweepRow row;
      row.scenario = scenario.name();
      row.mechanism = mechanism_name(spec.kind);
      row.epsilon = spec.epsilon;
      row.trials = config.trials;
      row.mse = estimate.mse;
      row.ci_low = estimate.ci_low;
      row.ci_high = estimate.ci_high;
      row.seed = config.seed;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

void write_double(std::ostream& out, double value) {
  std::ostringstream text;
  text << std::setprecision(17) << value;
  out << text.str();
}

}  // namespace

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "scenario,mechanism,epsilon,trials,mse,ci_low,ci_high,seed\n";
  for (const SweepRow& row : rows) {
    out << row.scenario << ',' << row.mechanism << ',';
    write_double(out, row.epsilon);
    out << ',' << row.trials << ',';
    write_double(out, row.mse);
    out << ',';
    write_double(out, row.ci_low);
    out << ',';
    write_double(out, row.ci_high);
    out << ',' << row.seed << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("sweep csv: empty input");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream fields(line);
    std::string field;
    SweepRow row;
    std::getline(fields, row.scenario, ',');
    std::getline(fields, row.mechanism, ',');
    std::getline(fields, field, ',');
    row.epsilon = std::stod(field);
    std::getline(fields, field, ',');
    row.trials = std::stoull(field);
    std::getline(fields, field, ',');
    row.mse = std::stod(field);
    std::getline(fields, field, ',');
    row.ci_low = std::stod(field);
    std::getline(fields, field, ',');
    row.ci_high = std::stod(field);
    std::getline(fields, field, ',');
    row.seed = std::stoull(field);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::map<std::string, std::string> parse_config_file(std::istream& in) {
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config: expected key=value on line " +
                               std::to_string(line_number));
    }
    auto trim = [](std::string text) {
      const auto a = text.find_first_not_of(" \t");
      const auto b = text.find_last_not_of(" \t");
      return a == std::string::npos ? std::string()
                                    : text.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error("config: empty key on line " +
                               std::to_string(line_number));
    }
    values[key] = value;
  }
  return values;
}

std::vector<double> parse_double_list(const std::string& comma_list) {
  std::vector<double> values;
  std::stringstream stream(comma_list);
  std::string field;
  while (std::getline(stream, field, ',')) {
    if (field.empty()) continue;
    values.push_back(std::stod(field));
  }
  return values;
}

}  // namespace dpselect::harness
