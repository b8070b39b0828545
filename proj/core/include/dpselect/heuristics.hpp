#pragma once

#include <cstddef>
#include <vector>

#include "dpselect/core.hpp"
#include "dpselect/rng.hpp"

namespace dpselect::heuristics {

/// Correlation between candidate scores and sensitivities under three
/// measures. Degenerate (zero variance) inputs yield coefficient 0.
struct CorrelationReport {
  double pearson = 0.0;
  double spearman = 0.0;
  double weighted = 0.0;
  std::size_t bucket_count = 5;
};

struct UtilityBoundFlags {
  bool gem_worse_than_rnm = false;
  bool gem_worse_than_random = false;
};

/// Average (fractional) ranks: ties share the mean of their rank positions.
std::vector<double> average_ranks(const std::vector<double>& values);

/// Pearson correlation; 0 if either input has zero variance.
double pearson(const std::vector<double>& q, const std::vector<double>& d);

/// Spearman rank correlation: Pearson of the average-ranked vectors.
double spearman(const std::vector<double>& q, const std::vector<double>& d);

/// Bucketed weighted correlation. The score range is split into `buckets`
/// half-open intervals (the last one closed); each candidate's weight is its
/// sensitivity divided by the maximum sensitivity in its bucket, and the
/// coefficient is the weighted Pearson of (q, d) under those weights.
double weighted_correlation(const std::vector<double>& q,
                            const std::vector<double>& d,
                            std::size_t buckets = 5);

CorrelationReport correlation_report(const SelectionProblem& problem,
                                     std::size_t buckets = 5);

/// Binary randomized response: returns `bit` with probability
/// e^eps / (e^eps + 1), the flipped bit otherwise.
int two_rr(int bit, double epsilon, RngStream& rng);

/// Threshold tests on the sensitivity of the optimal candidate:
///   worse than RNM     iff  delta_opt > max(delta) / 2
///   worse than random  iff  delta_opt > (q_best - q_worst) * eps / (4 log(k/beta))
UtilityBoundFlags utility_bound_flags(const SelectionProblem& problem,
                                      double epsilon, double beta);

}  // namespace dpselect::heuristics
