#include <stdexcept>

#include "doctest.h"
#include "dpselect/core.hpp"
#include "test_util.hpp"

using namespace dpselect;

TEST_CASE("make_problem computes the optimal index and global sensitivity") {
  const SelectionProblem problem = make_problem({0.0, 1.0}, {1.0, 2.0});
  CHECK(problem.optimal_index == 1);
  CHECK(problem.global_sensitivity() == 2.0);
}

TEST_CASE("ties go to the lowest index") {
  const SelectionProblem problem = make_problem({3.0, 3.0}, {1.0, 1.0});
  CHECK(problem.optimal_index == 0);
}

TEST_CASE("bimodal split mirrors the first scenario") {
  std::vector<double> scores;
  std::vector<double> sens;
  for (int i = 0; i < 50; ++i) {
    scores.push_back(1.0);
    sens.push_back(1.8);
  }
  for (int i = 0; i < 50; ++i) {
    scores.push_back(-1.0);
    sens.push_back(1.0);
  }
  const SelectionProblem problem = make_problem(scores, sens);
  CHECK(problem.optimal_index == 0);
  CHECK(problem.global_sensitivity() == 1.8);
}

TEST_CASE("make_problem rejects bad input") {
  CHECK_THROWS_AS(make_problem({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_problem({1.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_problem({1.0}, {-0.5}), std::invalid_argument);
}

TEST_CASE("random_select on a singleton always returns index 0") {
  const SelectionProblem problem = make_problem({2.0}, {1.0});
  RngStream rng(0, 0);
  for (int i = 0; i < 100; ++i) {
    CHECK(random_select(problem, rng).chosen_index == 0);
  }
}

TEST_CASE("random_select is uniform over four candidates") {
  const SelectionProblem problem =
      make_problem({1.0, 2.0, 3.0, 4.0}, {1.0, 1.0, 1.0, 1.0});
  RngStream rng(7, 0);
  const auto freq = testing::selection_frequencies(
      problem, 1'000'000, rng, [](const SelectionProblem& p, RngStream& r) {
        return random_select(p, r).chosen_index;
      });
  for (double f : freq) {
    CHECK(f == doctest::Approx(0.25).epsilon(0.012));  // 0.25 +- 0.003
  }
}

TEST_CASE("random_select replays identically on the same stream") {
  const SelectionProblem problem =
      make_problem({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});
  RngStream a(11, 4);
  RngStream b(11, 4);
  for (int i = 0; i < 1000; ++i) {
    CHECK(random_select(problem, a).chosen_index ==
          random_select(problem, b).chosen_index);
  }
}

TEST_CASE("mechanism names round-trip through the parser") {
  for (MechanismKind kind :
       {MechanismKind::random, MechanismKind::krr, MechanismKind::rnm_exp,
        MechanismKind::rnm_laplace, MechanismKind::rnmh,
        MechanismKind::rs_gamma, MechanismKind::rs_gamma_improved,
        MechanismKind::gem, MechanismKind::mgem, MechanismKind::combined_gem}) {
    CHECK(parse_mechanism(mechanism_name(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_mechanism("nope"), std::invalid_argument);
}

TEST_CASE("privacy budgets validate their ranges") {
  CHECK_NOTHROW(validate(PrivacyBudget{1.0, 0.0}));
  CHECK_NOTHROW(validate(PrivacyBudget{0.5, 1.0}));
  CHECK_THROWS_AS(validate(PrivacyBudget{0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(PrivacyBudget{1.0, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(validate(PrivacyBudget{1.0, 1.5}), std::invalid_argument);
}

TEST_CASE("spec validation rejects out-of-range parameters") {
  MechanismSpec spec;
  spec.kind = MechanismKind::gem;
  spec.epsilon = 0.0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.epsilon = 1.0;
  spec.beta = 1.5;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.beta = 0.05;
  CHECK_NOTHROW(validate(spec));
  spec.kind = MechanismKind::rs_gamma_improved;
  spec.eta = -2.0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
}
