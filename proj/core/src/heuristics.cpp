#include "dpselect/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dpselect::heuristics {

namespace {

// Weighted Pearson; w == nullptr means unit weights. Returns 0 when either
// weighted variance vanishes.
double weighted_pearson(const std::vector<double>& q,
                        const std::vector<double>& d,
                        const std::vector<double>* w) {
  const std::size_t n = q.size();
  double weight_sum = 0.0, mean_q = 0.0, mean_d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w ? (*w)[i] : 1.0;
    weight_sum += wi;
    mean_q += wi * q[i];
    mean_d += wi * d[i];
  }
  if (weight_sum <= 0.0) return 0.0;
  mean_q /= weight_sum;
  mean_d /= weight_sum;

  double cov = 0.0, var_q = 0.0, var_d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w ? (*w)[i] : 1.0;
    const double dq = q[i] - mean_q;
    const double dd = d[i] - mean_d;
    cov += wi * dq * dd;
    var_q += wi * dq * dq;
    var_d += wi * dd * dd;
  }
  if (var_q <= 0.0 || var_d <= 0.0) return 0.0;
  return cov / (std::sqrt(var_q) * std::sqrt(var_d));
}

}  // namespace

std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });

  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share rank (i + j)/2 + 1 in 1-based terms.
    const double shared = 1.0 + 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& q, const std::vector<double>& d) {
  if (q.size() != d.size() || q.size() < 2) {
    throw std::invalid_argument("pearson: need two equal-length vectors");
  }
  return weighted_pearson(q, d, nullptr);
}

double spearman(const std::vector<double>& q, const std::vector<double>& d) {
  if (q.size() != d.size() || q.size() < 2) {
    throw std::invalid_argument("spearman: need two equal-length vectors");
  }
  const std::vector<double> rq = average_ranks(q);
  const std::vector<double> rd = average_ranks(d);
  return weighted_pearson(rq, rd, nullptr);
}

double weighted_correlation(const std::vector<double>& q,
                            const std::vector<double>& d,
                            std::size_t buckets) {
  if (q.size() != d.size() || q.size() < 2) {
    throw std::invalid_argument(
        "weighted_correlation: need two equal-length vectors");
  }
  if (buckets == 0) {
    throw std::invalid_argument("weighted_correlation: buckets must be >= 1");
  }
  const std::size_t n = q.size();
  const double q_min = *std::min_element(q.begin(), q.end());
  const double q_max = *std::max_element(q.begin(), q.end());
  const double span = q_max - q_min;

  std::vector<std::size_t> bucket_of(n, 0);
  if (span > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      auto b = static_cast<std::size_t>((q[i] - q_min) / span *
                                        static_cast<double>(buckets));
      bucket_of[i] = std::min(b, buckets - 1);  // top edge joins last bucket
    }
  }

  std::vector<double> bucket_max(buckets, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    bucket_max[bucket_of[i]] = std::max(bucket_max[bucket_of[i]], d[i]);
  }

  std::vector<double> weights(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = bucket_max[bucket_of[i]];
    weights[i] = m > 0.0 ? d[i] / m : 1.0;
  }
  return weighted_pearson(q, d, &weights);
}

CorrelationReport correlation_report(const SelectionProblem& problem,
                                     std::size_t buckets) {
  CorrelationReport report;
  report.bucket_count = buckets;
  report.pearson = pearson(problem.scores, problem.sensitivities);
  report.spearman = spearman(problem.scores, problem.sensitivities);
  report.weighted =
      weighted_correlation(problem.scores, problem.sensitivities, buckets);
  return report;
}

int two_rr(int bit, double epsilon, RngStream& rng) {
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("two_rr: epsilon must be nonnegative");
  }
  const double keep = std::exp(epsilon) / (std::exp(epsilon) + 1.0);
  return rng.uniform() < keep ? bit : 1 - bit;
}

UtilityBoundFlags utility_bound_flags(const SelectionProblem& problem,
                                      double epsilon, double beta) {
  if (!(epsilon > 0.0) || !(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("utility_bound_flags: bad epsilon/beta");
  }
  const double delta_opt = problem.sensitivities[problem.optimal_index];
  const double max_delta = problem.global_sensitivity();
  const double q_best =
      *std::max_element(problem.scores.begin(), problem.scores.end());
  const double q_worst =
      *std::min_element(problem.scores.begin(), problem.scores.end());
  const double t = 2.0 * std::log(static_cast<double>(problem.size()) / beta) /
                   epsilon;

  UtilityBoundFlags flags;
  flags.gem_worse_than_rnm = delta_opt > 0.5 * max_delta;
  flags.gem_worse_than_random = delta_opt > (q_best - q_worst) / (2.0 * t);
  return flags;
}

}  // namespace dpselect::heuristics
