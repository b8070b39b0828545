#include "dpselect/core.hpp"

#include <algorithm>
#include <stdexcept>

namespace dpselect {

double SelectionProblem::global_sensitivity() const {
  double max_delta = 0.0;
  for (double d : sensitivities) max_delta = std::max(max_delta, d);
  return max_delta;
}

std::size_t argmax_lowest(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

SelectionProblem make_problem(std::vector<double> scores,
                              std::vector<double> sensitivities) {
  if (scores.empty()) {
    throw std::invalid_argument("make_problem: empty candidate list");
  }
  if (scores.size() != sensitivities.size()) {
    throw std::invalid_argument(
        "make_problem: scores and sensitivities differ in length");
  }
  for (double d : sensitivities) {
    if (!(d >= 0.0)) {
      throw std::invalid_argument("make_problem: negative sensitivity");
    }
  }
  SelectionProblem problem;
  problem.optimal_index = argmax_lowest(scores);
  problem.scores = std::move(scores);
  problem.sensitivities = std::move(sensitivities);
  return problem;
}

SelectionOutcome random_select(const SelectionProblem& problem,
                               RngStream& rng) {
  SelectionOutcome out;
  out.chosen_index = rng.uniform_index(problem.size());
  return out;
}

void validate(const PrivacyBudget& budget) {
  if (!(budget.epsilon > 0.0)) {
    throw std::invalid_argument("privacy budget requires epsilon > 0");
  }
  if (!(budget.delta >= 0.0 && budget.delta <= 1.0)) {
    throw std::invalid_argument("privacy budget requires delta in [0, 1]");
  }
}

void validate(const MechanismSpec& spec) {
  const bool needs_positive_eps =
      spec.kind != MechanismKind::random && spec.kind != MechanismKind::krr;
  if (needs_positive_eps && !(spec.epsilon > 0.0)) {
    throw std::invalid_argument("mechanism requires epsilon > 0");
  }
  if (spec.kind == MechanismKind::krr && !(spec.epsilon >= 0.0)) {
    throw std::invalid_argument("krr requires epsilon >= 0");
  }
  switch (spec.kind) {
    case MechanismKind::gem:
    case MechanismKind::mgem:
      if (!(spec.beta > 0.0 && spec.beta < 1.0)) {
        throw std::invalid_argument("beta must lie in (0, 1)");
      }
      break;
    case MechanismKind::rs_gamma:
      if (!(spec.gamma > 0.0 && spec.gamma <= 1.0)) {
        throw std::invalid_argument("gamma must lie in (0, 1]");
      }
      break;
    case MechanismKind::rs_gamma_improved:
      if (!(spec.gamma > 0.0 && spec.gamma < 1.0)) {
        throw std::invalid_argument("improved RS requires gamma in (0, 1)");
      }
      if (!(spec.eta > -1.0)) {
        throw std::invalid_argument("eta must be greater than -1");
      }
      break;
    case MechanismKind::combined_gem:
      if (!(spec.corr_fraction > 0.0 && spec.corr_fraction < 1.0)) {
        throw std::invalid_argument("corr_fraction must lie in (0, 1)");
      }
      if (!(spec.beta > 0.0 && spec.beta < 1.0)) {
        throw std::invalid_argument("beta must lie in (0, 1)");
      }
      break;
    default:
      break;
  }
}

std::string mechanism_name(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::random: return "random";
    case MechanismKind::krr: return "krr";
    case MechanismKind::rnm_exp: return "rnm";
    case MechanismKind::rnm_laplace: return "rnm_laplace";
    case MechanismKind::rnmh: return "rnmh";
    case MechanismKind::rs_gamma: return "rs_gamma";
    case MechanismKind::rs_gamma_improved: return "rs_gamma_improved";
    case MechanismKind::gem: return "gem";
    case MechanismKind::mgem: return "mgem";
    case MechanismKind::combined_gem: return "combined_gem";
  }
  return "unknown";
}

MechanismKind parse_mechanism(const std::string& name) {
  if (name == "random") return MechanismKind::random;
  if (name == "krr") return MechanismKind::krr;
  if (name == "rnm" || name == "rnm_exp") return MechanismKind::rnm_exp;
  if (name == "rnm_laplace") return MechanismKind::rnm_laplace;
  if (name == "rnmh") return MechanismKind::rnmh;
  if (name == "rs_gamma") return MechanismKind::rs_gamma;
  if (name == "rs_gamma_improved") return MechanismKind::rs_gamma_improved;
  if (name == "gem") return MechanismKind::gem;
  if (name == "mgem") return MechanismKind::mgem;
  if (name == "combined_gem") return MechanismKind::combined_gem;
  throw std::invalid_argument("unknown mechanism: " + name);
}

}  // namespace dpselect
