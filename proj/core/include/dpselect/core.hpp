#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpselect/rng.hpp"

namespace dpselect {

/// Floor applied to candidate-wise sensitivities wherever a mechanism
/// divides by them, so pairwise denominators never vanish.
inline constexpr double kSensitivityFloor = 1e-6;

/// One private-selection instance: candidate scores plus candidate-wise
/// sensitivities in the same units.
struct SelectionProblem {
  std::vector<double> scores;
  std::vector<double> sensitivities;
  std::size_t optimal_index = 0;  // argmax of scores, lowest index on ties

  std::size_t size() const { return scores.size(); }

  /// Global sensitivity: max over candidate-wise sensitivities.
  double global_sensitivity() const;
};

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;  // 0 for every mechanism implemented here
};

/// Throws std::invalid_argument unless epsilon > 0 and delta is in [0, 1].
void validate(const PrivacyBudget& budget);

enum class MechanismKind {
  random,
  krr,
  rnm_exp,
  rnm_laplace,
  rnmh,
  rs_gamma,
  rs_gamma_improved,
  gem,
  mgem,
  combined_gem,
};

/// Which mechanism to run and its hyper-parameters. Defaults follow the
/// evaluation setup: gamma = 0.05, beta = 0.05, corr_fraction = 0.6.
struct MechanismSpec {
  MechanismKind kind = MechanismKind::rnm_exp;
  double epsilon = 1.0;
  double beta = 0.05;           // GEM / mGEM
  double gamma = 0.05;          // RS variants
  double eta = 0.0;             // improved RS stopping distribution
  double corr_fraction = 0.6;   // combined GEM: eps_c = corr_fraction * eps

  MechanismSpec with_epsilon(double eps) const {
    MechanismSpec copy = *this;
    copy.epsilon = eps;
    return copy;
  }
};

/// Throws std::invalid_argument if the parameters for the selected kind are
/// out of range.
void validate(const MechanismSpec& spec);

std::string mechanism_name(MechanismKind kind);
MechanismKind parse_mechanism(const std::string& name);

enum class GemBranch { gem, mgem };

struct SelectionOutcome {
  std::size_t chosen_index = 0;
  std::optional<std::vector<double>> noised_scores;
  std::optional<std::vector<double>> transformed_scores;  // GEM family
  std::optional<GemBranch> branch;                        // combined GEM
  std::optional<std::uint64_t> iterations;                // RS family
};

/// Row-major dense matrix of trial scores (rows = trials, cols = candidates).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

/// Builds a SelectionProblem, computing the optimal index (lowest-index tie
/// rule). Throws std::invalid_argument on length mismatch, empty input, or
/// negative sensitivity.
SelectionProblem make_problem(std::vector<double> scores,
                              std::vector<double> sensitivities);

/// Baseline that ignores the scores: each index with probability 1/k.
SelectionOutcome random_select(const SelectionProblem& problem, RngStream& rng);

/// Index of the max element, lowest index winning ties.
std::size_t argmax_lowest(const std::vector<double>& values);

}  // namespace dpselect
