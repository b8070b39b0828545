#include "dpselect/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "dpselect/mechanisms.hpp"
#include "dpselect/noise.hpp"

namespace dpselect::bandit {

double ucb_score(double sum_rewards, std::size_t count, std::size_t horizon,
                 double alpha) {
  if (count == 0) {
    throw std::invalid_argument("ucb_score: unplayed arm must be bootstrapped");
  }
  const double n = static_cast<double>(count);
  return sum_rewards / n +
         alpha * std::sqrt(std::log(static_cast<double>(horizon)) / n);
}

PrivateCounter::PrivateCounter(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("PrivateCounter: epsilon must be positive");
  }
}

void PrivateCounter::close_epoch(RngStream& rng) {
  closed_noisy_total_ +=
      epoch_true_sum_ + noise::sample_laplace(2.0 / epsilon_, rng);
  ++epoch_;
  epoch_pos_ = 0;
  epoch_true_sum_ = 0.0;
  level_true_.assign(epoch_ + 1, 0.0);
  level_noisy_.assign(epoch_ + 1, 0.0);
}

void PrivateCounter::add(double value, RngStream& rng) {
  const double x = std::clamp(value, 0.0, 1.0);
  if (level_true_.empty()) {
    level_true_.assign(epoch_ + 1, 0.0);
    level_noisy_.assign(epoch_ + 1, 0.0);
  }
  ++total_count_;
  epoch_true_sum_ += x;
  ++epoch_pos_;

  // Binary counter over the open epoch: position's lowest set bit gives the
  // finished node level; lower levels fold into it.
  std::size_t level = 0;
  while (((epoch_pos_ >> level) & 1ULL) == 0ULL) ++level;
  double node_sum = x;
  for (std::size_t j = 0; j < level; ++j) {
    node_sum += level_true_[j];
    level_true_[j] = 0.0;
    level_noisy_[j] = 0.0;
  }
  const std::size_t levels = epoch_ + 1;
  const double node_scale = 2.0 * static_cast<double>(levels) / epsilon_;
  level_true_[level] = node_sum;
  level_noisy_[level] = node_sum + noise::sample_laplace(node_scale, rng);

  if (epoch_pos_ == (1ULL << epoch_)) close_epoch(rng);
}

double PrivateCounter::query() const {
  double total = closed_noisy_total_;
  for (std::size_t j = 0; j < level_noisy_.size(); ++j) {
    if ((epoch_pos_ >> j) & 1ULL) total += level_noisy_[j];
  }
  return total;
}

double dp_quantile(const std::vector<double>& window, double q, double epsilon,
                   RngStream& rng) {
  if (window.empty()) {
    throw std::invalid_argument("dp_quantile: window must be nonempty");
  }
  if (!(q > 0.0 && q < 1.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("dp_quantile: bad q or epsilon");
  }
  std::vector<double> sorted(window);
  for (auto& v : sorted) v = std::clamp(v, 0.0, 1.0);
  std::sort(sorted.begin(), sorted.end());

  const std::size_t n = sorted.size();
  const double target = q * static_cast<double>(n);
  // Interval i = [bounds[i], bounds[i+1]] has i window points below it.
  std::vector<double> bounds;
  bounds.reserve(n + 2);
  bounds.push_back(0.0);
  bounds.insert(bounds.end(), sorted.begin(), sorted.end());
  bounds.push_back(1.0);

  std::vector<double> weights(n + 1);
  double best_utility = -static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) {
    best_utility =
        std::max(best_utility, -std::abs(static_cast<double>(i) - target));
  }
  double total = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double utility = -std::abs(static_cast<double>(i) - target);
    weights[i] = std::exp(0.5 * epsilon * (utility - best_utility));
    total += weights[i];
  }
  double u = rng.uniform() * total;
  std::size_t chosen = n;
  for (std::size_t i = 0; i <= n; ++i) {
    if (u < weights[i]) {
      chosen = i;
      break;
    }
    u -= weights[i];
  }
  return 0.5 * (bounds[chosen] + bounds[chosen + 1]);
}

std::string BanditPolicy::name() const {
  return is_ucb ? "ucb" : mechanism_name(mechanism.kind);
}

double BanditTrajectory::post_shift_reward(std::size_t t_shift) const {
  if (cumulative_reward.empty()) return 0.0;
  const double final_total = cumulative_reward.back();
  if (t_shift == 0) return final_total;
  if (t_shift >= cumulative_reward.size()) return 0.0;
  return final_total - cumulative_reward[t_shift - 1];
}

BanditTrajectory run_bandit(const BanditConfig& config,
                            const BanditPolicy& policy, std::uint64_t seed) {
  if (config.horizon == 0 || config.t_shift >= config.horizon) {
    throw std::invalid_argument("run_bandit: need 0 < t_shift < horizon");
  }
  if (!policy.is_ucb) validate(policy.mechanism);

  RngStream reward_rng(seed, 1);
  RngStream mechanism_rng(seed, 2);
  RngStream quantile_rng(seed, 3);
  RngStream counter_rng(seed, 4);

  const std::size_t horizon = config.horizon;
  BanditTrajectory traj;
  traj.actions.reserve(horizon);
  traj.rewards.reserve(horizon);
  traj.cumulative_reward.reserve(horizon);
  traj.est_means = Matrix(horizon, 2);
  traj.est_p10 = Matrix(horizon, 2);
  traj.est_p90 = Matrix(horizon, 2);

  std::array<PrivateCounter, 2> counters{PrivateCounter(config.eps_mean),
                                         PrivateCounter(config.eps_mean)};
  std::array<std::size_t, 2> plays{0, 0};
  std::array<double, 2> true_sums{0.0, 0.0};
  std::array<std::vector<double>, 2> buffers;
  std::array<double, 2> p10_est{0.0, 0.0};
  std::array<double, 2> p90_est{1.0, 1.0};
  std::array<double, 2> delta_est{1.0, 1.0};

  double cumulative = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    std::size_t action;
    if (plays[0] == 0) {
      action = 0;
    } else if (plays[1] == 0) {
      action = 1;
    } else if (policy.is_ucb) {
      const double score0 =
          ucb_score(true_sums[0], plays[0], horizon, config.ucb_alpha);
      const double score1 =
          ucb_score(true_sums[1], plays[1], horizon, config.ucb_alpha);
      action = score1 > score0 ? 1 : 0;
    } else {
      const double mean0 =
          counters[0].query() / static_cast<double>(plays[0]);
      const double mean1 =
          counters[1].query() / static_cast<double>(plays[1]);
      SelectionProblem step_problem =
          make_problem({mean0, mean1}, {delta_est[0], delta_est[1]});
      MechanismSpec spec = policy.mechanism;
      spec.epsilon = spec.kind == MechanismKind::krr ? config.krr_eps
                                                     : config.eps_select;
      action =
          mechanisms::run_mechanism(step_problem, spec, mechanism_rng)
              .chosen_index;
    }

    const std::size_t step = t + 1;
    const double raw = noise::sample_normal(config.arm_mean(step, action),
                                            config.arm_sd(step, action),
                                            reward_rng);
    const double reward = std::clamp(raw, 0.0, 1.0);

    ++plays[action];
    true_sums[action] += reward;
    counters[action].add(reward, counter_rng);
    buffers[action].push_back(reward);
    ++traj.observations[action];

    if (buffers[action].size() >= config.window) {
      p10_est[action] =
          dp_quantile(buffers[action], 0.1, config.eps_quantile / 2.0,
                      quantile_rng);
      p90_est[action] =
          dp_quantile(buffers[action], 0.9, config.eps_quantile / 2.0,
                      quantile_rng);
      delta_est[action] = std::abs(p90_est[action] - p10_est[action]);
      traj.quantile_observations_used[action] += buffers[action].size();
      buffers[action].clear();
    }

    traj.actions.push_back(static_cast<int>(action));
    traj.rewards.push_back(reward);
    cumulative += reward;
    traj.cumulative_reward.push_back(cumulative);
    for (std::size_t a = 0; a < 2; ++a) {
      double estimate = 0.0;
      if (plays[a] > 0) {
        estimate = policy.is_ucb
                       ? true_sums[a] / static_cast<double>(plays[a])
                       : counters[a].query() / static_cast<double>(plays[a]);
      }
      traj.est_means.at(t, a) = estimate;
      traj.est_p10.at(t, a) = p10_est[a];
      traj.est_p90.at(t, a) = p90_est[a];
    }
  }
  return traj;
}

void write_trajectory_csv(const BanditTrajectory& trajectory,
                          std::ostream& out) {
  out << "step,action,reward,est_mean_0,est_mean_1,p10_0,p90_0,p10_1,p90_1,"
         "cumulative_reward\n";
  for (std::size_t t = 0; t < trajectory.actions.size(); ++t) {
    out << t + 1 << ',' << trajectory.actions[t] << ','
        << trajectory.rewards[t] << ',' << trajectory.est_means.at(t, 0) << ','
        << trajectory.est_means.at(t, 1) << ',' << trajectory.est_p10.at(t, 0)
        << ',' << trajectory.est_p90.at(t, 0) << ','
        << trajectory.est_p10.at(t, 1) << ',' << trajectory.est_p90.at(t, 1)
        << ',' << trajectory.cumulative_reward[t] << '\n';
  }
}

}  // namespace dpselect::bandit
