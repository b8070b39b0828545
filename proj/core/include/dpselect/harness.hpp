#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dpselect/core.hpp"
#include "dpselect/rng.hpp"
#include "dpselect/scenarios.hpp"

namespace dpselect::harness {

struct MseEstimate {
  double mse = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t trials = 0;
};

/// Mean squared score gap to the per-trial optimal candidate over `trials`
/// runs of the mechanism on a fixed problem. The 95% interval uses the
/// normal approximation over per-trial squared gaps.
MseEstimate evaluate_mse(const SelectionProblem& problem,
                         const MechanismSpec& mechanism, std::size_t trials,
                         RngStream& rng);

/// As above over a list of per-trial problems; trial i runs on
/// problems[i % size], so the optimum is recomputed per trial.
MseEstimate evaluate_mse(const std::vector<SelectionProblem>& problems,
                         const MechanismSpec& mechanism, std::size_t trials,
                         RngStream& rng);

/// One mechanism run per row of the trial set (clipped scores).
MseEstimate evaluate_mse(const scenarios::TrialSet& trial_set,
                         const MechanismSpec& mechanism, RngStream& rng);

/// log(mean selected score of a / mean selected score of b) over `trials`
/// runs each. Throws std::domain_error if either mean is nonpositive (shift
/// the scores to a positive range before calling).
double log_score_ratio(const MechanismSpec& mech_a, const MechanismSpec& mech_b,
                       const SelectionProblem& problem, std::size_t trials,
                       RngStream& rng);

/// Sparse triplet score file: header `user_id,item_id,score`, one triplet
/// per line, UTF-8, decimal float scores.
struct ScoreMatrixFile {
  std::vector<std::string> user_ids;  // first-seen order
  std::vector<std::string> item_ids;  // first-seen order
  // per user: (item index, score) pairs in file order
  std::vector<std::vector<std::pair<std::size_t, double>>> entries;
};

ScoreMatrixFile read_score_matrix(std::istream& in);

struct IngestResult {
  std::vector<std::string> user_ids;
  std::vector<SelectionProblem> problems;                // per listed user
  std::vector<std::vector<std::size_t>> item_indices;    // per-user candidates
  std::vector<double> item_sensitivities;                // per global item
  std::vector<std::string> warnings;
};

/// Builds per-user selection problems from predicted scores. Item
/// sensitivities are the 1st-to-99th percentile gap of each item's scores
/// across all users (1e-6 for constant items); each user's candidate set is
/// their top `top_k` items by score.
IngestResult ingest_scores(const ScoreMatrixFile& file,
                           std::size_t top_k = 500);

struct SweepConfig {
  scenarios::ScenarioSpec scenario;
  std::vector<MechanismSpec> mechanisms;
  std::vector<double> epsilons;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
};

struct SweepRow {
  std::string scenario;
  std::string mechanism;
  double epsilon = 0.0;
  std::size_t trials = 0;
  double mse = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t seed = 0;
};

/// Log-spaced epsilon grid from 0.01 to 16.
std::vector<double> default_epsilon_grid(std::size_t points = 12);

/// Scenario x mechanism x epsilon sweep; cells draw from disjoint streams
/// derived from the seed, so reruns are byte-identical.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

/// Plain key=value config file; '#' starts a comment line.
std::map<std::string, std::string> parse_config_file(std::istream& in);

std::vector<double> parse_double_list(const std::string& comma_list);

}  // namespace dpselect::harness
