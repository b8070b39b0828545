#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dpselect/rng.hpp"

namespace dpselect::noise {

/// Exponential sample with the given mean (not rate), via inverse CDF of a
/// single uniform draw. Mean parameterization is used everywhere in this
/// codebase; callers convert budgets as mean = 2*delta/epsilon.
inline double sample_exponential(double mean, RngStream& rng) {
  if (!(mean > 0.0)) {
    throw std::invalid_argument("sample_exponential: mean must be positive");
  }
  return -mean * std::log1p(-rng.uniform());
}

/// Laplace sample centered at 0 with the given scale; one uniform draw.
inline double sample_laplace(double scale, RngStream& rng) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("sample_laplace: scale must be positive");
  }
  const double u = rng.uniform() - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

/// Standard normal quantile (inverse CDF). Acklam's rational approximation
/// refined with one Halley step; accurate to ~1e-15 on (0, 1).
double normal_quantile(double p);

/// Normal sample via inverse CDF; one uniform draw per sample.
inline double sample_normal(double mean, double sd, RngStream& rng) {
  return mean + sd * normal_quantile(rng.uniform());
}

/// Normal restricted to [lo, hi] by rejection from the parent normal; the
/// stream is consumed sequentially so replay is deterministic.
double sample_truncated_normal(double mean, double sd, double lo, double hi,
                               RngStream& rng);

enum class StoppingKind { geometric, truncated_negative_binomial };

/// Distribution of the number of draws taken by random-stopping selection.
struct StoppingRule {
  StoppingKind kind = StoppingKind::geometric;
  double gamma = 0.05;
  double eta = 0.0;  // truncated negative binomial only

  static StoppingRule geometric(double gamma) {
    return StoppingRule{StoppingKind::geometric, gamma, 0.0};
  }
  static StoppingRule truncated_negative_binomial(double gamma, double eta) {
    return StoppingRule{StoppingKind::truncated_negative_binomial, gamma, eta};
  }
};

/// Pmf of the truncated negative binomial on {1, 2, ...}:
///   eta != 0:  P[K=k] = (1-gamma)^k / (gamma^-eta - 1) * prod_{l<k} (l+eta)/(l+1)
///   eta == 0:  P[K=k] = (1-gamma)^k / (k * log(1/gamma))
double truncated_negative_binomial_pmf(std::uint64_t k, double gamma,
                                       double eta);

/// Closed-form mean of the stopping count.
double stopping_mean(const StoppingRule& rule);

/// Draws K >= 1 from the stopping rule. Geometric uses a single-draw inverse
/// CDF; the truncated negative binomial inverts a lazily extended cumulative
/// table built to 1 - 1e-12.
std::uint64_t sample_stopping_count(const StoppingRule& rule, RngStream& rng);

}  // namespace dpselect::noise
