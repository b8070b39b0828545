#include "dpselect/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dpselect/noise.hpp"
#include "dpselect/rng.hpp"

namespace dpselect::scenarios {

namespace {

constexpr std::uint64_t kSigmaStreamId = 101;
constexpr std::uint64_t kMeanStreamId = 102;
constexpr std::uint64_t kScoreStreamId = 103;

std::vector<double> truncated_sigmas(std::size_t n, RngStream& rng) {
  std::vector<double> sigmas(n);
  for (auto& s : sigmas) {
    s = noise::sample_truncated_normal(0.5, 1.0, 0.01, 0.7, rng);
  }
  return sigmas;
}

TrialSet trialset_from_normal_columns(const std::vector<double>& means,
                                      const std::vector<double>& sds,
                                      std::uint64_t seed, std::size_t trials) {
  const std::size_t n = means.size();
  Matrix raw(trials, n);
  RngStream score_rng(seed, kScoreStreamId);
  for (std::size_t i = 0; i < trials; ++i) {
    for (std::size_t a = 0; a < n; ++a) {
      raw.at(i, a) = noise::sample_normal(means[a], sds[a], score_rng);
    }
  }
  return estimate_sensitivities(raw);
}

}  // namespace

SelectionProblem TrialSet::trial_problem(std::size_t trial) const {
  std::vector<double> scores(candidates());
  for (std::size_t a = 0; a < candidates(); ++a) {
    scores[a] = clipped_scores.at(trial, a);
  }
  return make_problem(std::move(scores), sensitivities);
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw std::invalid_argument("empirical_quantile: empty input");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("empirical_quantile: q must lie in [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

TrialSet estimate_sensitivities(const Matrix& raw_scores, double q_lo,
                                double q_hi) {
  if (raw_scores.rows < 2) {
    throw std::invalid_argument("estimate_sensitivities: need >= 2 trials");
  }
  if (!(q_lo >= 0.0 && q_lo <= q_hi && q_hi <= 1.0)) {
    throw std::invalid_argument("estimate_sensitivities: bad quantile pair");
  }
  TrialSet set;
  set.raw_scores = raw_scores;
  set.clipped_scores = raw_scores;
  set.quantile_lo = q_lo;
  set.quantile_hi = q_hi;
  set.sensitivities.resize(raw_scores.cols);

  std::vector<double> column(raw_scores.rows);
  for (std::size_t a = 0; a < raw_scores.cols; ++a) {
    for (std::size_t i = 0; i < raw_scores.rows; ++i) {
      column[i] = raw_scores.at(i, a);
    }
    const double lo = empirical_quantile(column, q_lo);
    const double hi = empirical_quantile(column, q_hi);
    set.sensitivities[a] = hi - lo;
    for (std::size_t i = 0; i < raw_scores.rows; ++i) {
      set.clipped_scores.at(i, a) = std::clamp(raw_scores.at(i, a), lo, hi);
    }
  }
  return set;
}

SelectionProblem gen_bimodal(std::size_t n, double frac_high, double q_hi,
                             double q_lo, double d_hi, double d_lo) {
  if (n == 0 || !(frac_high >= 0.0 && frac_high <= 1.0)) {
    throw std::invalid_argument("gen_bimodal: bad parameters");
  }
  const auto n_high = static_cast<std::size_t>(
      std::ceil(frac_high * static_cast<double>(n)));
  std::vector<double> scores(n, q_lo);
  std::vector<double> sens(n, d_lo);
  for (std::size_t a = 0; a < std::min(n_high, n); ++a) {
    scores[a] = q_hi;
    sens[a] = d_hi;
  }
  return make_problem(std::move(scores), std::move(sens));
}

SelectionProblem make_bimodal_scenario(int variant, std::size_t n) {
  switch (variant) {
    case 1:
      return gen_bimodal(n, 0.5, 1.0, -1.0, 1.8, 1.0);
    case 2:
      return gen_bimodal(n, 0.5, 1.0, -1.0, 1.0, 1.8);
    case 3: {
      std::vector<double> scores(n);
      std::vector<double> sens(n);
      const std::size_t half = n / 2;
      for (std::size_t a = 0; a < n; ++a) {
        scores[a] = a < half ? 1.0 : -1.0;
        sens[a] = a % 2 == 0 ? 1.8 : 1.0;
      }
      return make_problem(std::move(scores), std::move(sens));
    }
    default:
      throw std::invalid_argument("make_bimodal_scenario: variant must be 1-3");
  }
}

TrialSet gen_trialset_s4(std::uint64_t seed, std::size_t trials,
                         std::size_t candidates) {
  RngStream sigma_rng(seed, kSigmaStreamId);
  std::vector<double> sds = truncated_sigmas(candidates, sigma_rng);
  std::sort(sds.begin(), sds.end());
  std::vector<double> means(candidates);
  for (std::size_t a = 0; a < candidates; ++a) {
    means[a] = std::log(static_cast<double>(a + 1));
  }
  return trialset_from_normal_columns(means, sds, seed, trials);
}

TrialSet gen_trialset_s5(std::uint64_t seed, std::size_t trials,
                         std::size_t candidates) {
  std::vector<double> means(candidates);
  std::vector<double> sds(candidates);
  for (std::size_t a = 0; a < candidates; ++a) {
    const double idx = static_cast<double>(a + 1);
    means[a] = 0.1 * idx;
    sds[a] = 2.3 - 0.02 * idx;
    if (!(sds[a] > 0.0)) {
      throw std::invalid_argument("gen_trialset_s5: candidate count too large");
    }
  }
  return trialset_from_normal_columns(means, sds, seed, trials);
}

TrialSet gen_trialset_s6(std::uint64_t seed, std::size_t trials,
                         std::size_t candidates) {
  RngStream param_rng(seed, kMeanStreamId);
  std::vector<double> means(candidates);
  std::vector<double> sds(candidates);
  for (std::size_t a = 0; a < candidates; ++a) {
    means[a] = param_rng.uniform();
    sds[a] = noise::sample_truncated_normal(0.5, 1.0, 0.01, 0.7, param_rng);
  }
  return trialset_from_normal_columns(means, sds, seed, trials);
}

TrialSet gen_trialset_increasing_corr(double t_param, std::uint64_t seed,
                                      std::size_t trials,
                                      std::size_t candidates) {
  RngStream scale_rng(seed, kSigmaStreamId);
  std::vector<double> scales(candidates);
  for (auto& u : scales) u = std::abs(noise::sample_normal(0.0, 1.0, scale_rng));

  Matrix raw(trials, candidates);
  RngStream score_rng(seed, kScoreStreamId);
  std::vector<double> row(candidates);
  for (std::size_t i = 0; i < trials; ++i) {
    double lowest = 0.0;
    for (std::size_t a = 0; a < candidates; ++a) {
      const double z = noise::sample_normal(0.0, 1.0, score_rng);
      row[a] = scales[a] * (t_param + z) / 5.0;
      if (a == 0 || row[a] < lowest) lowest = row[a];
    }
    for (std::size_t a = 0; a < candidates; ++a) {
      raw.at(i, a) = row[a] - lowest;
    }
  }
  return estimate_sensitivities(raw);
}

PolarizedData gen_polarized(std::size_t users, std::size_t candidates,
                            double sigma, std::uint64_t seed) {
  if (users == 0 || users % 2 != 0) {
    throw std::invalid_argument("gen_polarized: user count must be even");
  }
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("gen_polarized: sigma must be nonnegative");
  }
  const std::size_t half = users / 2;
  const double n_cand = static_cast<double>(candidates);

  Matrix scores(users, candidates);
  RngStream rng(seed, kScoreStreamId);
  for (std::size_t u = 0; u < users; ++u) {
    const bool group1 = u >= half;
    for (std::size_t a = 0; a < candidates; ++a) {
      const double base =
          group1 ? 8.0 - 8.0 * static_cast<double>(a) / n_cand
                 : -8.0 + 8.0 * static_cast<double>(a) / n_cand;
      scores.at(u, a) = base + noise::sample_normal(0.0, sigma, rng);
    }
  }

  // Sensitivities from the pooled per-candidate 5th/95th quantile band; user
  // scores are clipped into the band.
  TrialSet pooled = estimate_sensitivities(scores, 0.05, 0.95);

  PolarizedData data;
  data.sensitivities = pooled.sensitivities;
  data.problems.reserve(users);
  data.group.reserve(users);
  for (std::size_t u = 0; u < users; ++u) {
    data.problems.push_back(pooled.trial_problem(u));
    data.group.push_back(u >= half ? 1 : 0);
  }
  return data;
}

std::string ScenarioSpec::name() const {
  std::ostringstream out;
  switch (kind) {
    case ScenarioKind::bimodal:
      out << "s" << bimodal_variant;
      break;
    case ScenarioKind::s4_lognormal_means:
      out << "s4";
      break;
    case ScenarioKind::s5_linear:
      out << "s5";
      break;
    case ScenarioKind::s6_uniform:
      out << "s6";
      break;
    case ScenarioKind::increasing_corr:
      out << "increasing:" << t_param;
      break;
    case ScenarioKind::polarized:
      out << "polarized:" << sigma;
      break;
  }
  return out.str();
}

ScenarioSpec parse_scenario(const std::string& text) {
  ScenarioSpec spec;
  if (text == "s1" || text == "s2" || text == "s3") {
    spec.kind = ScenarioKind::bimodal;
    spec.bimodal_variant = text[1] - '0';
    return spec;
  }
  if (text == "s4") {
    spec.kind = ScenarioKind::s4_lognormal_means;
    return spec;
  }
  if (text == "s5") {
    spec.kind = ScenarioKind::s5_linear;
    return spec;
  }
  if (text == "s6") {
    spec.kind = ScenarioKind::s6_uniform;
    return spec;
  }
  if (text.rfind("increasing:", 0) == 0) {
    spec.kind = ScenarioKind::increasing_corr;
    spec.t_param = std::stod(text.substr(11));
    return spec;
  }
  if (text.rfind("polarized:", 0) == 0) {
    spec.kind = ScenarioKind::polarized;
    spec.sigma = std::stod(text.substr(10));
    return spec;
  }
  throw std::invalid_argument("unknown scenario: " + text);
}

std::vector<SelectionProblem> realize_scenario(const ScenarioSpec& spec,
                                               std::uint64_t seed) {
  switch (spec.kind) {
    case ScenarioKind::bimodal:
      return {make_bimodal_scenario(spec.bimodal_variant, spec.candidates)};
    case ScenarioKind::s4_lognormal_means:
    case ScenarioKind::s5_linear:
    case ScenarioKind::s6_uniform:
    case ScenarioKind::increasing_corr: {
      TrialSet set;
      if (spec.kind == ScenarioKind::s4_lognormal_means) {
        set = gen_trialset_s4(seed, spec.trials, spec.candidates);
      } else if (spec.kind == ScenarioKind::s5_linear) {
        set = gen_trialset_s5(seed, spec.trials, spec.candidates);
      } else if (spec.kind == ScenarioKind::s6_uniform) {
        set = gen_trialset_s6(seed, spec.trials, spec.candidates);
      } else {
        set = gen_trialset_increasing_corr(spec.t_param, seed, spec.trials,
                                           spec.candidates);
      }
      std::vector<SelectionProblem> problems;
      problems.reserve(set.trials());
      for (std::size_t i = 0; i < set.trials(); ++i) {
        problems.push_back(set.trial_problem(i));
      }
      return problems;
    }
    case ScenarioKind::polarized: {
      PolarizedData data =
          gen_polarized(spec.users, spec.candidates, spec.sigma, seed);
      // Alternate the two groups so truncated runs stay balanced.
      std::vector<SelectionProblem> problems;
      const std::size_t count = std::min(spec.trials, data.problems.size());
      problems.reserve(count);
      const std::size_t half = data.problems.size() / 2;
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t user =
            (i % 2 == 0) ? i / 2 : half + i / 2;
        problems.push_back(data.problems[user % data.problems.size()]);
      }
      return problems;
    }
  }
  throw std::invalid_argument("realize_scenario: unknown scenario kind");
}

}  // namespace dpselect::scenarios
