#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dpselect/core.hpp"
#include "dpselect/rng.hpp"

namespace dpselect::analysis {

/// Probability that two-candidate RNM outputs the lower-scoring candidate:
/// (1/2) exp(-eps (q2 - q1) / (2 delta)). Requires q1 < q2, delta > 0.
double closed_form_rnm_error(double q1, double q2, double delta,
                             double epsilon);

/// Probability that two-candidate RNMH outputs the lower-scoring candidate:
/// 1/(1 + d2/d1) * exp(-eps (q2 - q1) / (2 d1)). Requires q1 < q2, d2 > 0;
/// d1 == 0 gives 0.
double closed_form_rnmh_error(double q1, double q2, double d1, double d2,
                              double epsilon);

/// Monte Carlo miss-rate gap Pr[A != optimal] - Pr[B != optimal]; positive
/// means B performs better on this problem.
double hg(const MechanismSpec& mech_a, const MechanismSpec& mech_b,
          const SelectionProblem& problem, std::size_t trials, RngStream& rng);

/// Empirical ratio Pr[M(D1) = target] / Pr[M(D2) = target] with a 95%
/// interval from Wilson bounds combined by interval arithmetic.
struct DpRatioReport {
  double empirical_ratio = 0.0;
  std::optional<double> analytic_ratio;
  std::size_t trials = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  std::size_t count1 = 0;
  std::size_t count2 = 0;
  bool low_counts = false;  // either event count below 100
};

using SelectFn =
    std::function<std::size_t(const SelectionProblem&, RngStream&)>;

DpRatioReport verify_dp_ratio(const SelectFn& mechanism,
                              const SelectionProblem& problem_d1,
                              const SelectionProblem& problem_d2,
                              std::size_t target_index, std::size_t trials,
                              RngStream& rng);

/// A pair of adjacent selection problems with the analytic output
/// probabilities of the distinguished candidate on each.
struct CounterexampleInstance {
  std::string name;
  SelectionProblem d1;
  SelectionProblem d2;
  std::size_t target_index = 0;
  double analytic_p1 = 0.0;
  double analytic_p2 = 0.0;
  double analytic_ratio = 0.0;
  SelectFn mechanism;
};

/// Laplace-noise RNMH on k candidates where the target candidate has zero
/// sensitivity; the output-probability ratio is exp((k-1) eps).
CounterexampleInstance laplace_rnmh_instance(std::size_t k, double epsilon);

/// Exponential-noise RNMH with a zero-sensitivity candidate: probability 0
/// of returning it on D1 and 1 - exp(-eps/4) on D2.
CounterexampleInstance exponential_rnmh_instance(double epsilon);

/// Random stopping with exponential noise. The analytic probabilities use
/// the geometric-stopping closed forms; here analytic_ratio is p2/p1 since
/// the target candidate is more likely under d2.
CounterexampleInstance rs_exponential_instance(std::size_t k, double gamma,
                                               double epsilon);

/// CDF at x of the max of independent zero-centered Laplace variables with
/// the given scales. At x = 0 this is 2^-A for A scales.
double laplace_max_cdf(const std::vector<double>& scales, double x);

}  // namespace dpselect::analysis
