#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dpselect/core.hpp"
#include "dpselect/rng.hpp"

namespace dpselect::bandit {

/// Two-armed bandit with a distribution shift: at t = t_shift the two arms
/// swap means and standard deviations. Rewards are clipped to [0, 1].
struct BanditConfig {
  std::size_t horizon = 5000;  // T
  std::size_t t_shift = 3000;
  std::array<double, 2> means_before{0.2, 0.8};
  std::array<double, 2> sds_before{0.1, 0.3};
  std::array<double, 2> means_after{0.8, 0.2};
  std::array<double, 2> sds_after{0.3, 0.1};
  std::size_t window = 200;    // observations per quantile refresh
  double eps_mean = 1.0;       // continual-counter budget per arm stream
  double eps_select = 1.0;     // per-step selection budget
  double eps_quantile = 1.0;   // budget per released quantile pair
  double krr_eps = 4.0;        // selection budget used by the kRR policy
  double ucb_alpha = 1.4142135623730951;

  double arm_mean(std::size_t step_1based, std::size_t arm) const {
    return step_1based > t_shift ? means_after[arm] : means_before[arm];
  }
  double arm_sd(std::size_t step_1based, std::size_t arm) const {
    return step_1based > t_shift ? sds_after[arm] : sds_before[arm];
  }
};

/// UCB optimism score: mean + alpha * sqrt(ln(T) / count). The horizon T is
/// the final horizon. Throws on count == 0 (arms are bootstrapped by a
/// forced play before scoring).
double ucb_score(double sum_rewards, std::size_t count, std::size_t horizon,
                 double alpha);

/// Continual counter releasing all prefix sums of a [0, 1]-valued stream
/// under an epsilon budget. Epochs of doubling length: each closed epoch
/// contributes one noisy total (budget eps/2), and a binary tree mechanism
/// over the open epoch covers the remainder (budget eps/2 split across
/// levels). Queries are deterministic between adds.
class PrivateCounter {
 public:
  explicit PrivateCounter(double epsilon);

  /// Adds a value (clipped to [0, 1]); noise for any finished tree nodes is
  /// drawn from the given stream.
  void add(double value, RngStream& rng);

  /// Noisy running sum; exact prefix sum plus zero-mean noise whose
  /// magnitude grows polylogarithmically in the count.
  double query() const;

  std::uint64_t count() const { return total_count_; }

 private:
  void close_epoch(RngStream& rng);

  double epsilon_;
  std::uint64_t total_count_ = 0;
  double closed_noisy_total_ = 0.0;
  std::size_t epoch_ = 0;        // epoch e holds 2^e values
  std::uint64_t epoch_pos_ = 0;  // values added within the open epoch
  double epoch_true_sum_ = 0.0;
  std::vector<double> level_true_;
  std::vector<double> level_noisy_;
};

/// Exponential-mechanism quantile over the intervals between order
/// statistics of the window (bounds 0 and 1 added). Interval utility is
/// -|#points below - q*n| with sensitivity 1; returns the midpoint of the
/// chosen interval.
double dp_quantile(const std::vector<double>& window, double q, double epsilon,
                   RngStream& rng);

struct BanditPolicy {
  bool is_ucb = false;
  MechanismSpec mechanism{};

  static BanditPolicy ucb() { return BanditPolicy{true, {}}; }
  static BanditPolicy with_mechanism(MechanismKind kind) {
    BanditPolicy policy;
    policy.mechanism.kind = kind;
    return policy;
  }
  std::string name() const;
};

struct BanditTrajectory {
  std::vector<int> actions;
  std::vector<double> rewards;
  Matrix est_means;  // horizon x 2, estimate used by the policy, post-update
  Matrix est_p10;    // horizon x 2, current private quantile estimates
  Matrix est_p90;
  std::vector<double> cumulative_reward;
  std::array<std::size_t, 2> observations{0, 0};
  std::array<std::size_t, 2> quantile_observations_used{0, 0};

  /// Reward accumulated strictly after step t_shift.
  double post_shift_reward(std::size_t t_shift) const;
};

/// Runs one trajectory. Private policies select actions through the
/// mechanism applied to (private means, private quantile-band sensitivities);
/// kRR uses its own selection budget and RNM uses the max sensitivity.
BanditTrajectory run_bandit(const BanditConfig& config,
                            const BanditPolicy& policy, std::uint64_t seed);

void write_trajectory_csv(const BanditTrajectory& trajectory,
                          std::ostream& out);

}  // namespace dpselect::bandit
