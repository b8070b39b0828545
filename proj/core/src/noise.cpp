#include "dpselect/noise.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace dpselect::noise {

namespace {

constexpr double kSqrt2Pi = 2.506628274631000502;

double acklam_initial(double p) {
  // Coefficients from Acklam's inverse-normal-CDF approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
            a[5]) *
           q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
           c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
  }
  double x = acklam_initial(p);
  // One Halley refinement against the exact CDF.
  const double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = err * kSqrt2Pi * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double sample_truncated_normal(double mean, double sd, double lo, double hi,
                               RngStream& rng) {
  if (!(sd > 0.0) || !(lo < hi)) {
    throw std::invalid_argument("sample_truncated_normal: bad parameters");
  }
  for (;;) {
    const double x = sample_normal(mean, sd, rng);
    if (x >= lo && x <= hi) return x;
  }
}

double truncated_negative_binomial_pmf(std::uint64_t k, double gamma,
                                       double eta) {
  if (k == 0) return 0.0;
  if (eta == 0.0) {
    return std::pow(1.0 - gamma, static_cast<double>(k)) /
           (static_cast<double>(k) * std::log(1.0 / gamma));
  }
  double product = 1.0;
  for (std::uint64_t l = 0; l < k; ++l) {
    product *= (static_cast<double>(l) + eta) / (static_cast<double>(l) + 1.0);
  }
  return std::pow(1.0 - gamma, static_cast<double>(k)) /
         (std::pow(gamma, -eta) - 1.0) * product;
}

double stopping_mean(const StoppingRule& rule) {
  if (rule.kind == StoppingKind::geometric) return 1.0 / rule.gamma;
  if (rule.eta == 0.0) {
    return (1.0 / rule.gamma - 1.0) / std::log(1.0 / rule.gamma);
  }
  return rule.eta * (1.0 - rule.gamma) /
         (rule.gamma * (1.0 - std::pow(rule.gamma, rule.eta)));
}

namespace {

// Cumulative table for the truncated negative binomial, extended on demand.
// Values are keyed by (gamma, eta); the table is grown until the residual
// mass drops below 1e-12.
struct TnbTable {
  std::vector<double> cumulative;  // cumulative[i] = P[K <= i + 1]
  double gamma = 0.0;
  double eta = 0.0;

  void extend_to_cover(double target) {
    std::uint64_t k = cumulative.size() + 1;
    double total = cumulative.empty() ? 0.0 : cumulative.back();
    while (total < target || total < 1.0 - 1e-12) {
      total += truncated_negative_binomial_pmf(k, gamma, eta);
      cumulative.push_back(total);
      ++k;
      if (total >= 1.0) break;
    }
  }
};

}  // namespace

std::uint64_t sample_stopping_count(const StoppingRule& rule, RngStream& rng) {
  if (rule.kind == StoppingKind::geometric) {
    if (rule.gamma >= 1.0) return 1;
    if (!(rule.gamma > 0.0)) {
      throw std::invalid_argument("stopping rule: gamma must lie in (0, 1]");
    }
    const double u = rng.uniform();
    const double k =
        1.0 + std::floor(std::log1p(-u) / std::log1p(-rule.gamma));
    return static_cast<std::uint64_t>(std::max(1.0, k));
  }

  if (!(rule.gamma > 0.0 && rule.gamma < 1.0) || !(rule.eta > -1.0)) {
    throw std::invalid_argument("stopping rule: invalid gamma/eta");
  }
  thread_local std::map<std::pair<double, double>, TnbTable> tables;
  TnbTable& table = tables[{rule.gamma, rule.eta}];
  if (table.cumulative.empty()) {
    table.gamma = rule.gamma;
    table.eta = rule.eta;
    table.extend_to_cover(0.0);
  }
  const double u = rng.uniform();
  if (u > table.cumulative.back()) {
    // Residual mass beyond the table is below 1e-12; return the tail point.
    return table.cumulative.size();
  }
  const auto it =
      std::lower_bound(table.cumulative.begin(), table.cumulative.end(), u);
  return static_cast<std::uint64_t>(it - table.cumulative.begin()) + 1;
}

}  // namespace dpselect::noise
