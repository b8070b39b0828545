#include "dpselect/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpselect/mechanisms.hpp"

namespace dpselect::analysis {

double closed_form_rnm_error(double q1, double q2, double delta,
                             double epsilon) {
  if (!(q1 < q2)) {
    throw std::invalid_argument("closed_form_rnm_error: requires q1 < q2");
  }
  if (!(delta > 0.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument(
        "closed_form_rnm_error: delta and epsilon must be positive");
  }
  return 0.5 * std::exp(-epsilon * (q2 - q1) / (2.0 * delta));
}

double closed_form_rnmh_error(double q1, double q2, double d1, double d2,
                              double epsilon) {
  if (!(q1 < q2)) {
    throw std::invalid_argument("closed_form_rnmh_error: requires q1 < q2");
  }
  if (!(d1 >= 0.0) || !(d2 > 0.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("closed_form_rnmh_error: bad parameters");
  }
  if (d1 == 0.0) return 0.0;
  return std::exp(-epsilon * (q2 - q1) / (2.0 * d1)) / (1.0 + d2 / d1);
}

double hg(const MechanismSpec& mech_a, const MechanismSpec& mech_b,
          const SelectionProblem& problem, std::size_t trials,
          RngStream& rng) {
  if (trials == 0) {
    throw std::invalid_argument("hg: trials must be >= 1");
  }
  RngStream stream_a = rng.substream(1);
  RngStream stream_b = rng.substream(2);
  std::size_t misses_a = 0;
  std::size_t misses_b = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    if (mechanisms::run_mechanism(problem, mech_a, stream_a).chosen_index !=
        problem.optimal_index) {
      ++misses_a;
    }
    if (mechanisms::run_mechanism(problem, mech_b, stream_b).chosen_index !=
        problem.optimal_index) {
      ++misses_b;
    }
  }
  return (static_cast<double>(misses_a) - static_cast<double>(misses_b)) /
         static_cast<double>(trials);
}

namespace {

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// 95% Wilson score interval for a binomial proportion.
Interval wilson(std::size_t successes, std::size_t trials) {
  constexpr double z = 1.959964;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace

DpRatioReport verify_dp_ratio(const SelectFn& mechanism,
                              const SelectionProblem& problem_d1,
                              const SelectionProblem& problem_d2,
                              std::size_t target_index, std::size_t trials,
                              RngStream& rng) {
  if (problem_d1.size() != problem_d2.size()) {
    throw std::invalid_argument("verify_dp_ratio: problems differ in size");
  }
  if (trials == 0) {
    throw std::invalid_argument("verify_dp_ratio: trials must be >= 1");
  }
  RngStream stream1 = rng.substream(1);
  RngStream stream2 = rng.substream(2);

  DpRatioReport report;
  report.trials = trials;
  for (std::size_t i = 0; i < trials; ++i) {
    if (mechanism(problem_d1, stream1) == target_index) ++report.count1;
    if (mechanism(problem_d2, stream2) == target_index) ++report.count2;
  }
  const double n = static_cast<double>(trials);
  report.p1 = static_cast<double>(report.count1) / n;
  report.p2 = static_cast<double>(report.count2) / n;
  report.low_counts = report.count1 < 100 || report.count2 < 100;

  const Interval ci1 = wilson(report.count1, trials);
  const Interval ci2 = wilson(report.count2, trials);
  if (report.count2 == 0) {
    report.empirical_ratio = std::numeric_limits<double>::infinity();
    report.ci_low = ci2.high > 0.0 ? ci1.low / ci2.high : 0.0;
    report.ci_high = std::numeric_limits<double>::infinity();
    return report;
  }
  report.empirical_ratio = report.p1 / report.p2;
  report.ci_low = ci1.low / ci2.high;
  report.ci_high =
      ci2.low > 0.0 ? ci1.high / ci2.low : std::numeric_limits<double>::infinity();
  return report;
}

CounterexampleInstance laplace_rnmh_instance(std::size_t k, double epsilon) {
  if (k < 2 || !(epsilon > 0.0)) {
    throw std::invalid_argument("laplace_rnmh_instance: bad parameters");
  }
  CounterexampleInstance instance;
  instance.name = "laplace_rnmh";
  std::vector<double> sens(k, 1.0);
  sens[0] = 0.0;
  std::vector<double> scores_d2(k, 1.0);
  scores_d2[0] = 0.0;
  instance.d1 = make_problem(std::vector<double>(k, 0.0), sens);
  instance.d2 = make_problem(scores_d2, sens);
  instance.target_index = 0;
  const double km1 = static_cast<double>(k - 1);
  instance.analytic_p1 = std::pow(0.5, km1);
  instance.analytic_p2 = std::pow(0.5 * std::exp(-epsilon), km1);
  instance.analytic_ratio = std::exp(km1 * epsilon);
  instance.mechanism = [epsilon](const SelectionProblem& p, RngStream& r) {
    return mechanisms::rnm_laplace(p, epsilon, /*heterogeneous=*/true, r)
        .chosen_index;
  };
  return instance;
}

CounterexampleInstance exponential_rnmh_instance(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("exponential_rnmh_instance: bad epsilon");
  }
  CounterexampleInstance instance;
  instance.name = "exponential_rnmh";
  instance.d1 = make_problem({0.0, 0.5}, {0.0, 1.0});
  instance.d2 = make_problem({0.0, -0.5}, {0.0, 1.0});
  instance.target_index = 0;
  instance.analytic_p1 = 0.0;
  instance.analytic_p2 = 1.0 - std::exp(-epsilon / 4.0);
  instance.analytic_ratio = 0.0;
  instance.mechanism = [epsilon](const SelectionProblem& p, RngStream& r) {
    return mechanisms::rnmh(p, epsilon, r).chosen_index;
  };
  return instance;
}

CounterexampleInstance rs_exponential_instance(std::size_t k, double gamma,
                                               double epsilon) {
  if (k < 2 || !(gamma > 0.0 && gamma < 1.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("rs_exponential_instance: bad parameters");
  }
  CounterexampleInstance instance;
  instance.name = "rs_exponential";
  std::vector<double> sens(k, 1.0);
  sens[0] = 0.0;
  std::vector<double> scores_d2(k, 0.0);
  scores_d2[0] = 1.0;
  // d1: all scores 1; the target wins only if it is the sole candidate ever
  // sampled. d2: other scores drop to 0; the target also wins when every
  // other sampled draw stays below 1.
  instance.d1 = make_problem(std::vector<double>(k, 1.0), sens);
  instance.d2 = make_problem(scores_d2, sens);
  instance.target_index = 0;

  const double kd = static_cast<double>(k);
  const double pick = 1.0 / kd;
  const double below = 1.0 - std::exp(-epsilon / 6.0);
  // Geometric stopping with Pr[K = t] = gamma (1-gamma)^(t-1):
  //   p1 = sum_t Pr[K=t] pick^t
  //   p2 = sum_t Pr[K=t] (A^t - B^t),  A = pick + (1-pick) below,
  //                                    B = (1-pick) below
  // (the B term removes runs in which the target was never sampled).
  const auto geometric_sum = [gamma](double x) {
    return gamma * x / (1.0 - (1.0 - gamma) * x);
  };
  const double a = pick + (1.0 - pick) * below;
  const double b = (1.0 - pick) * below;
  instance.analytic_p1 = geometric_sum(pick);
  instance.analytic_p2 = geometric_sum(a) - geometric_sum(b);
  instance.analytic_ratio = instance.analytic_p2 / instance.analytic_p1;
  instance.mechanism = [gamma, epsilon](const SelectionProblem& p,
                                        RngStream& r) {
    return mechanisms::rs_gamma(p, epsilon,
                                noise::StoppingRule::geometric(gamma), r,
                                mechanisms::RsNoise::exponential)
        .chosen_index;
  };
  return instance;
}

double laplace_max_cdf(const std::vector<double>& scales, double x) {
  if (scales.empty()) {
    throw std::invalid_argument("laplace_max_cdf: need at least one scale");
  }
  double product = 1.0;
  for (double b : scales) {
    if (!(b > 0.0)) {
      throw std::invalid_argument("laplace_max_cdf: scales must be positive");
    }
    product *= x > 0.0 ? 1.0 - 0.5 * std::exp(-x / b)
                       : 0.5 * std::exp(x / b);
  }
  return product;
}

}  // namespace dpselect::analysis
