#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpselect/core.hpp"

namespace dpselect::scenarios {

/// Per-candidate score draws plus the sensitivities and clipped scores
/// derived from empirical quantiles of each candidate's column.
struct TrialSet {
  Matrix raw_scores;      // trials x candidates
  Matrix clipped_scores;  // same shape, clipped into the quantile band
  std::vector<double> sensitivities;
  double quantile_lo = 0.1;
  double quantile_hi = 0.9;

  std::size_t trials() const { return raw_scores.rows; }
  std::size_t candidates() const { return raw_scores.cols; }

  /// The selection problem for one trial row (clipped scores).
  SelectionProblem trial_problem(std::size_t trial) const;
};

enum class ScenarioKind {
  bimodal,
  s4_lognormal_means,
  s5_linear,
  s6_uniform,
  increasing_corr,
  polarized,
};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::bimodal;
  int bimodal_variant = 1;   // 1, 2, or 3
  double t_param = 0.0;      // increasing_corr
  double sigma = 0.5;        // polarized
  std::size_t candidates = 100;
  std::size_t trials = 1000;
  std::size_t users = 5000;  // polarized

  std::string name() const;
};

/// Parses scenario names: s1 s2 s3 s4 s5 s6, increasing:<t>, polarized:<sigma>.
ScenarioSpec parse_scenario(const std::string& text);

/// Empirical quantile with linear interpolation between order statistics
/// (values need not be sorted; q in [0, 1]).
double empirical_quantile(std::vector<double> values, double q);

/// Derives per-candidate sensitivities as the (q_hi - q_lo) empirical
/// quantile gap of each column and clips every score into that band.
TrialSet estimate_sensitivities(const Matrix& raw_scores, double q_lo = 0.1,
                                double q_hi = 0.9);

/// Deterministic bimodal problem: ceil(frac_high * n) candidates at
/// (q_hi, d_hi), the rest at (q_lo, d_lo).
SelectionProblem gen_bimodal(std::size_t n, double frac_high, double q_hi,
                             double q_lo, double d_hi, double d_lo);

/// The three bimodal scenarios: scores 1 / -1 half and half, sensitivities
/// 1.8 on the high-score group (variant 1), on the low-score group
/// (variant 2), or mixed evenly within both groups (variant 3).
SelectionProblem make_bimodal_scenario(int variant, std::size_t n = 100);

/// Candidate a = 1..n scores ~ Normal(log a, sigma_a^2) with sigma_a drawn
/// from a [0.01, 0.7]-truncated normal (location 0.5, scale 1), sorted
/// ascending.
TrialSet gen_trialset_s4(std::uint64_t seed, std::size_t trials = 1000,
                         std::size_t candidates = 100);

/// Candidate a scores ~ Normal(0.1 a, sd 2.3 - 0.02 a).
TrialSet gen_trialset_s5(std::uint64_t seed, std::size_t trials = 1000,
                         std::size_t candidates = 100);

/// Candidate means uniform on [0, 1], sds from the truncated normal; no
/// correlation imposed.
TrialSet gen_trialset_s6(std::uint64_t seed, std::size_t trials = 1000,
                         std::size_t candidates = 100);

/// Correlation family indexed by t: each candidate carries a fixed positive
/// latent scale u_a = |Normal(0,1)| and trial scores u_a (t + z)/5 with
/// fresh z ~ Normal(0,1), shifted so each trial's minimum is exactly 0.
/// Spearman(mean score, sensitivity) moves from -1 to +1 as t goes from
/// negative to positive.
TrialSet gen_trialset_increasing_corr(double t_param, std::uint64_t seed,
                                      std::size_t trials = 1000,
                                      std::size_t candidates = 100);

/// Polarized two-group population: group-0 base scores -8 + 8a/100 rise
/// with the candidate index, group-1 bases 8 - 8a/100 fall, plus
/// Normal(0, sigma^2) noise per (user, candidate). Sensitivities come from
/// the pooled 5th/95th quantile band per candidate; user scores are clipped
/// into that band.
struct PolarizedData {
  std::vector<SelectionProblem> problems;  // one per user
  std::vector<int> group;                  // 0 or 1 per user
  std::vector<double> sensitivities;       // shared across users
};

PolarizedData gen_polarized(std::size_t users, std::size_t candidates,
                            double sigma, std::uint64_t seed);

/// Materializes a scenario spec into trial problems. Bimodal scenarios
/// repeat the fixed problem for each trial; polarized scenarios use
/// spec.trials users sampled round-robin.
std::vector<SelectionProblem> realize_scenario(const ScenarioSpec& spec,
                                               std::uint64_t seed);

}  // namespace dpselect::scenarios
