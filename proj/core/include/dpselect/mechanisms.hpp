#pragma once

#include <cstdint>
#include <vector>

#include "dpselect/core.hpp"
#include "dpselect/noise.hpp"
#include "dpselect/rng.hpp"

namespace dpselect::mechanisms {

/// Guard on the number of draws a random-stopping run may take.
inline constexpr std::uint64_t kRsIterationCap = 10'000'000;

/// Scores shifted by t * sensitivity and pairwise-normalized so the overall
/// sensitivity is at most 1. The maximum entry is exactly 0 and every entry
/// is <= 0; sensitivities are floored at kSensitivityFloor before use.
struct GemTransform {
  double t = 0.0;
  std::vector<double> transformed_scores;
};

GemTransform gem_transform(const SelectionProblem& problem, double t);

/// Report Noisy Max: argmax of q_a + Exp(mean 2*Delta/eps) with the global
/// sensitivity Delta. If Delta == 0 the optimal index is returned exactly.
SelectionOutcome rnm(const SelectionProblem& problem, double epsilon,
                     RngStream& rng);

/// RNM with per-candidate exponential noise Exp(mean 2*Delta_a/eps).
/// Not differentially private; reference baseline only.
SelectionOutcome rnmh(const SelectionProblem& problem, double epsilon,
                      RngStream& rng);

/// RNM with Laplace noise. Heterogeneous: scale Delta_a/eps per candidate
/// (not DP in general); homogeneous: scale Delta/eps with the global Delta.
SelectionOutcome rnm_laplace(const SelectionProblem& problem, double epsilon,
                             bool heterogeneous, RngStream& rng);

/// k-ary randomized response: the optimal candidate with probability
/// e^eps / (e^eps + k - 1), any other uniformly.
SelectionOutcome krr(const SelectionProblem& problem, double epsilon,
                     RngStream& rng);

enum class RsNoise { laplace, exponential };

/// Random-stopping selection: draws K from the stopping rule, samples K
/// candidates uniformly with replacement, noises each sampled score, and
/// returns the candidate with the best noised score. The per-draw noise
/// scale is c*Delta_a/eps with c = 3 for the geometric rule and c = 2 + eta
/// for the truncated negative binomial. Exponential noise (mean 2c*Delta_a/eps)
/// is provided for the non-private counterexample analysis.
SelectionOutcome rs_gamma(const SelectionProblem& problem, double epsilon,
                          const noise::StoppingRule& stopping, RngStream& rng,
                          RsNoise noise_kind = RsNoise::laplace);

/// GEM: transform with t = +2 log(k/beta)/eps, then RNM over the transformed
/// scores with sensitivity 1 (exponential noise of mean 2/eps).
SelectionOutcome gem(const SelectionProblem& problem, double epsilon,
                     double beta, RngStream& rng);

/// mGEM: GEM with t negated, penalizing low-sensitivity candidates.
SelectionOutcome mgem(const SelectionProblem& problem, double epsilon,
                      double beta, RngStream& rng);

/// Combined GEM: releases the sign of Spearman(q, Delta) through binary
/// randomized response with eps_c = corr_fraction * eps, then runs mGEM on a
/// released 1 and GEM on a released 0 with the remaining budget.
SelectionOutcome combined_gem(const SelectionProblem& problem, double epsilon,
                              double corr_fraction, double beta,
                              RngStream& rng);

/// Dispatch by MechanismSpec; validates the spec.
SelectionOutcome run_mechanism(const SelectionProblem& problem,
                               const MechanismSpec& spec, RngStream& rng);

}  // namespace dpselect::mechanisms
