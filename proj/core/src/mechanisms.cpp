#include "dpselect/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpselect/heuristics.hpp"

namespace dpselect::mechanisms {

namespace {

void require_positive_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
}

// Argmax of q_a + Exp(mean_a); mean_a == 0 adds no noise.
SelectionOutcome noisy_argmax_exponential(const SelectionProblem& problem,
                                          const std::vector<double>& means,
                                          RngStream& rng) {
  std::vector<double> noised(problem.size());
  for (std::size_t a = 0; a < problem.size(); ++a) {
    const double z =
        means[a] > 0.0 ? noise::sample_exponential(means[a], rng) : 0.0;
    noised[a] = problem.scores[a] + z;
  }
  SelectionOutcome out;
  out.chosen_index = argmax_lowest(noised);
  out.noised_scores = std::move(noised);
  return out;
}

}  // namespace

SelectionOutcome rnm(const SelectionProblem& problem, double epsilon,
                     RngStream& rng) {
  require_positive_epsilon(epsilon);
  const double delta = problem.global_sensitivity();
  if (delta == 0.0) {
    SelectionOutcome out;
    out.chosen_index = problem.optimal_index;
    return out;
  }
  const std::vector<double> means(problem.size(), 2.0 * delta / epsilon);
  return noisy_argmax_exponential(problem, means, rng);
}

SelectionOutcome rnmh(const SelectionProblem& problem, double epsilon,
                      RngStream& rng) {
  require_positive_epsilon(epsilon);
  std::vector<double> means(problem.size());
  for (std::size_t a = 0; a < problem.size(); ++a) {
    means[a] = 2.0 * problem.sensitivities[a] / epsilon;
  }
  return noisy_argmax_exponential(problem, means, rng);
}

SelectionOutcome rnm_laplace(const SelectionProblem& problem, double epsilon,
                             bool heterogeneous, RngStream& rng) {
  require_positive_epsilon(epsilon);
  const double global = problem.global_sensitivity();
  std::vector<double> noised(problem.size());
  for (std::size_t a = 0; a < problem.size(); ++a) {
    const double scale =
        (heterogeneous ? problem.sensitivities[a] : global) / epsilon;
    const double z = scale > 0.0 ? noise::sample_laplace(scale, rng) : 0.0;
    noised[a] = problem.scores[a] + z;
  }
  SelectionOutcome out;
  out.chosen_index = argmax_lowest(noised);
  out.noised_scores = std::move(noised);
  return out;
}

SelectionOutcome krr(const SelectionProblem& problem, double epsilon,
                     RngStream& rng) {
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("krr: epsilon must be nonnegative");
  }
  SelectionOutcome out;
  const std::size_t k = problem.size();
  if (k == 1) {
    out.chosen_index = 0;
    return out;
  }
  // 1 / (1 + (k-1) e^-eps) = e^eps / (e^eps + k - 1), stable for large eps.
  const double p_optimal =
      1.0 / (1.0 + static_cast<double>(k - 1) * std::exp(-epsilon));
  const double u = rng.uniform();
  if (u < p_optimal) {
    out.chosen_index = problem.optimal_index;
    return out;
  }
  const double v = (u - p_optimal) / (1.0 - p_optimal);
  auto j = static_cast<std::size_t>(v * static_cast<double>(k - 1));
  j = std::min(j, k - 2);
  out.chosen_index = j < problem.optimal_index ? j : j + 1;
  return out;
}

SelectionOutcome rs_gamma(const SelectionProblem& problem, double epsilon,
                          const noise::StoppingRule& stopping, RngStream& rng,
                          RsNoise noise_kind) {
  require_positive_epsilon(epsilon);
  const double budget_factor =
      stopping.kind == noise::StoppingKind::geometric ? 3.0
                                                      : 2.0 + stopping.eta;
  const std::uint64_t draws = noise::sample_stopping_count(stopping, rng);
  if (draws > kRsIterationCap) {
    throw std::runtime_error("rs_gamma: iteration cap exceeded");
  }

  SelectionOutcome out;
  out.iterations = draws;
  double best = 0.0;
  bool have_best = false;
  for (std::uint64_t j = 0; j < draws; ++j) {
    const std::size_t a = rng.uniform_index(problem.size());
    const double scale = budget_factor * problem.sensitivities[a] / epsilon;
    double z = 0.0;
    if (scale > 0.0) {
      z = noise_kind == RsNoise::laplace
              ? noise::sample_laplace(scale, rng)
              : noise::sample_exponential(2.0 * scale, rng);
    }
    const double noisy = problem.scores[a] + z;
    if (!have_best || noisy > best) {
      best = noisy;
      have_best = true;
      out.chosen_index = a;
    }
  }
  return out;
}

GemTransform gem_transform(const SelectionProblem& problem, double t) {
  const std::size_t k = problem.size();
  std::vector<double> floored(k);
  for (std::size_t a = 0; a < k; ++a) {
    floored[a] = std::max(problem.sensitivities[a], kSensitivityFloor);
  }
  std::vector<double> shifted(k);
  for (std::size_t a = 0; a < k; ++a) {
    shifted[a] = problem.scores[a] - t * floored[a];
  }

  GemTransform transform;
  transform.t = t;
  transform.transformed_scores.resize(k);
  for (std::size_t a = 0; a < k; ++a) {
    double lowest = 0.0;  // the a' = a term
    for (std::size_t b = 0; b < k; ++b) {
      const double candidate =
          (shifted[a] - shifted[b]) / (floored[a] + floored[b]);
      lowest = std::min(lowest, candidate);
    }
    transform.transformed_scores[a] = lowest;
  }
  return transform;
}

namespace {

SelectionOutcome gem_with_t(const SelectionProblem& problem, double epsilon,
                            double t, RngStream& rng) {
  GemTransform transform = gem_transform(problem, t);
  // RNM over the unit-sensitivity transformed scores.
  std::vector<double> noised(problem.size());
  for (std::size_t a = 0; a < problem.size(); ++a) {
    noised[a] = transform.transformed_scores[a] +
                noise::sample_exponential(2.0 / epsilon, rng);
  }
  SelectionOutcome out;
  out.chosen_index = argmax_lowest(noised);
  out.noised_scores = std::move(noised);
  out.transformed_scores = std::move(transform.transformed_scores);
  return out;
}

double gem_shift_coefficient(const SelectionProblem& problem, double epsilon,
                             double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("beta must lie in (0, 1)");
  }
  return 2.0 * std::log(static_cast<double>(problem.size()) / beta) / epsilon;
}

}  // namespace

SelectionOutcome gem(const SelectionProblem& problem, double epsilon,
                     double beta, RngStream& rng) {
  require_positive_epsilon(epsilon);
  return gem_with_t(problem, epsilon,
                    gem_shift_coefficient(problem, epsilon, beta), rng);
}

SelectionOutcome mgem(const SelectionProblem& problem, double epsilon,
                      double beta, RngStream& rng) {
  require_positive_epsilon(epsilon);
  return gem_with_t(problem, epsilon,
                    -gem_shift_coefficient(problem, epsilon, beta), rng);
}

SelectionOutcome combined_gem(const SelectionProblem& problem, double epsilon,
                              double corr_fraction, double beta,
                              RngStream& rng) {
  require_positive_epsilon(epsilon);
  if (!(corr_fraction > 0.0 && corr_fraction < 1.0)) {
    throw std::invalid_argument("corr_fraction must lie in (0, 1)");
  }
  const double eps_corr = corr_fraction * epsilon;
  const double eps_select = epsilon - eps_corr;

  const double coefficient =
      heuristics::spearman(problem.scores, problem.sensitivities);
  const int bit = coefficient >= 0.0 ? 1 : 0;
  const int released = heuristics::two_rr(bit, eps_corr, rng);

  SelectionOutcome out = released == 1 ? mgem(problem, eps_select, beta, rng)
                                       : gem(problem, eps_select, beta, rng);
  out.branch = released == 1 ? GemBranch::mgem : GemBranch::gem;
  return out;
}

SelectionOutcome run_mechanism(const SelectionProblem& problem,
                               const MechanismSpec& spec, RngStream& rng) {
  validate(spec);
  switch (spec.kind) {
    case MechanismKind::random:
      return random_select(problem, rng);
    case MechanismKind::krr:
      return krr(problem, spec.epsilon, rng);
    case MechanismKind::rnm_exp:
      return rnm(problem, spec.epsilon, rng);
    case MechanismKind::rnm_laplace:
      return rnm_laplace(problem, spec.epsilon, /*heterogeneous=*/true, rng);
    case MechanismKind::rnmh:
      return rnmh(problem, spec.epsilon, rng);
    case MechanismKind::rs_gamma:
      return rs_gamma(problem, spec.epsilon,
                      noise::StoppingRule::geometric(spec.gamma), rng);
    case MechanismKind::rs_gamma_improved:
      return rs_gamma(problem, spec.epsilon,
                      noise::StoppingRule::truncated_negative_binomial(
                          spec.gamma, spec.eta),
                      rng);
    case MechanismKind::gem:
      return gem(problem, spec.epsilon, spec.beta, rng);
    case MechanismKind::mgem:
      return mgem(problem, spec.epsilon, spec.beta, rng);
    case MechanismKind::combined_gem:
      return combined_gem(problem, spec.epsilon, spec.corr_fraction, spec.beta,
                          rng);
  }
  throw std::invalid_argument("run_mechanism: unknown mechanism kind");
}

}  // namespace dpselect::mechanisms
