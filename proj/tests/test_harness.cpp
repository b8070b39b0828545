#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "dpselect/harness.hpp"
#include "dpselect/scenarios.hpp"
#include "test_util.hpp"

using namespace dpselect;
using namespace dpselect::harness;

namespace {

MechanismSpec spec_of(MechanismKind kind, double eps) {
  MechanismSpec spec;
  spec.kind = kind;
  spec.epsilon = eps;
  return spec;
}

}  // namespace

TEST_CASE("evaluate_mse vanishes when the mechanism is effectively exact") {
  const auto problem = make_problem({0.0, 1.0, 0.5}, {1.0, 1.0, 1.0});
  RngStream rng(51, 0);
  const auto estimate =
      evaluate_mse(problem, spec_of(MechanismKind::rnm_exp, 200.0), 20'000,
                   rng);
  CHECK(estimate.mse < 1e-4);
}

TEST_CASE("random selection on the first bimodal scenario has mse 2") {
  const auto problem = scenarios::make_bimodal_scenario(1);
  RngStream rng(51, 1);
  const auto estimate =
      evaluate_mse(problem, spec_of(MechanismKind::random, 1.0), 400'000, rng);
  CHECK(estimate.mse == doctest::Approx(2.0).epsilon(0.01));
  CHECK(estimate.ci_low <= 2.0);
  CHECK(2.0 <= estimate.ci_high);
}

TEST_CASE("evaluate_mse with one trial equals the single squared gap") {
  const auto problem = make_problem({0.0, 1.0}, {1.0, 1.0});
  RngStream rng(51, 2);
  const auto estimate =
      evaluate_mse(problem, spec_of(MechanismKind::rnm_exp, 0.01), 1, rng);
  CHECK((estimate.mse == 0.0 || estimate.mse == 1.0));
  CHECK(estimate.trials == 1);
}

TEST_CASE("log_score_ratio basics") {
  const auto problem = make_problem({1.0, 2.0, 3.0}, {0.5, 0.5, 0.5});
  RngStream rng(52, 0);
  SUBCASE("a mechanism against itself is near zero") {
    const double value =
        log_score_ratio(spec_of(MechanismKind::rnm_exp, 1.0),
                        spec_of(MechanismKind::rnm_exp, 1.0), problem, 2000,
                        rng);
    CHECK(std::abs(value) < 0.05);
  }
  SUBCASE("deterministic identical selections give exactly zero") {
    const double value =
        log_score_ratio(spec_of(MechanismKind::rnm_exp, 1e6),
                        spec_of(MechanismKind::rnm_exp, 1e6), problem, 50,
                        rng);
    CHECK(value == 0.0);
  }
  SUBCASE("nonpositive mean selected scores are refused") {
    const auto negative = make_problem({-2.0, -1.0}, {0.5, 0.5});
    CHECK_THROWS_AS(log_score_ratio(spec_of(MechanismKind::rnm_exp, 1.0),
                                    spec_of(MechanismKind::rnm_exp, 1.0),
                                    negative, 50, rng),
                    std::domain_error);
  }
}

TEST_CASE("mgem beats gem on a positively correlated positive-score problem") {
  // Monotone scores and sensitivities; small epsilon exaggerates the split.
  std::vector<double> scores;
  std::vector<double> sens;
  for (int a = 0; a < 30; ++a) {
    scores.push_back(1.0 + 0.2 * a);
    sens.push_back(0.1 + 0.05 * a);
  }
  const auto problem = make_problem(scores, sens);
  RngStream rng(52, 1);
  const double value =
      log_score_ratio(spec_of(MechanismKind::mgem, 0.2),
                      spec_of(MechanismKind::gem, 0.2), problem, 400, rng);
  CHECK(value > 0.0);
}

TEST_CASE("score matrix parsing and ingestion") {
  std::istringstream input(
      "user_id,item_id,score\n"
      "u1,i1,1.0\n"
      "u1,i2,2.0\n"
      "u2,i1,3.0\n"
      "u2,i2,2.0\n");
  const auto file = read_score_matrix(input);
  CHECK(file.user_ids.size() == 2);
  CHECK(file.item_ids.size() == 2);

  const auto result = ingest_scores(file);
  REQUIRE(result.problems.size() == 2);
  // Percentile oracle: i1 scores {1, 3} -> p99 - p1 = 0.98 * 2; i2 is {2, 2}.
  CHECK(result.item_sensitivities[0] == doctest::Approx(1.96).epsilon(1e-12));
  CHECK(result.item_sensitivities[1] == doctest::Approx(1e-6));
  // Problems keep per-user top ordering: u1's best item is i2.
  CHECK(result.problems[0].scores[0] == 2.0);
  CHECK(result.problems[0].optimal_index == 0);
}

TEST_CASE("ingestion respects top_k and keeps short users unpadded") {
  std::ostringstream text;
  text << "user_id,item_id,score\n";
  for (int i = 0; i < 300; ++i) {
    text << "u1,item" << i << ',' << 300 - i << "\n";
  }
  std::istringstream input(text.str());
  const auto result = ingest_scores(read_score_matrix(input), 500);
  REQUIRE(result.problems.size() == 1);
  CHECK(result.problems[0].size() == 300);

  std::istringstream input2(text.str());
  const auto capped = ingest_scores(read_score_matrix(input2), 100);
  CHECK(capped.problems[0].size() == 100);
  CHECK(capped.problems[0].scores[0] == 300.0);
}

TEST_CASE("ingestion is insensitive to user row order") {
  std::istringstream forward(
      "user_id,item_id,score\n"
      "u1,i1,1.0\nu2,i1,5.0\nu3,i1,3.0\n");
  std::istringstream shuffled(
      "user_id,item_id,score\n"
      "u3,i1,3.0\nu1,i1,1.0\nu2,i1,5.0\n");
  const auto a = ingest_scores(read_score_matrix(forward));
  const auto b = ingest_scores(read_score_matrix(shuffled));
  CHECK(a.item_sensitivities[0] == b.item_sensitivities[0]);
}

TEST_CASE("malformed score files are rejected; empty users warned") {
  std::istringstream bad_header("user,item,score\nu1,i1,1\n");
  CHECK_THROWS(read_score_matrix(bad_header));
  std::istringstream bad_row("user_id,item_id,score\nu1,i1\n");
  CHECK_THROWS(read_score_matrix(bad_row));
  std::istringstream bad_score("user_id,item_id,score\nu1,i1,abc\n");
  CHECK_THROWS(read_score_matrix(bad_score));

  std::istringstream empty_user(
      "user_id,item_id,score\n"
      "u1,i1,\n"
      "u2,i1,1.5\n");
  const auto result = ingest_scores(read_score_matrix(empty_user));
  CHECK(result.problems.size() == 1);
  CHECK(result.user_ids[0] == "u2");
  REQUIRE(result.warnings.size() == 1);
}

TEST_CASE("sweep rows are deterministic and round-trip through csv") {
  SweepConfig config;
  config.scenario = scenarios::parse_scenario("s1");
  config.mechanisms = {spec_of(MechanismKind::rnm_exp, 1.0),
                       spec_of(MechanismKind::random, 1.0)};
  config.epsilons = {0.1, 1.0};
  config.trials = 500;
  config.seed = 99;

  const auto rows = run_sweep(config);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].scenario == "s1");
  CHECK(rows[0].mechanism == "rnm");
  CHECK(rows[0].epsilon == 0.1);

  std::ostringstream out1;
  write_sweep_csv(rows, out1);
  const auto rows2 = run_sweep(config);
  std::ostringstream out2;
  write_sweep_csv(rows2, out2);
  CHECK(out1.str() == out2.str());

  std::istringstream in(out1.str());
  const auto parsed = read_sweep_csv(in);
  REQUIRE(parsed.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(parsed[i].scenario == rows[i].scenario);
    CHECK(parsed[i].mechanism == rows[i].mechanism);
    CHECK(parsed[i].epsilon == rows[i].epsilon);
    CHECK(parsed[i].trials == rows[i].trials);
    CHECK(parsed[i].mse == rows[i].mse);
    CHECK(parsed[i].ci_low == rows[i].ci_low);
    CHECK(parsed[i].ci_high == rows[i].ci_high);
    CHECK(parsed[i].seed == rows[i].seed);
  }
}

TEST_CASE("single mechanism and epsilon produce a single row") {
  SweepConfig config;
  config.scenario = scenarios::parse_scenario("s2");
  config.mechanisms = {spec_of(MechanismKind::gem, 1.0)};
  config.epsilons = {0.5};
  config.trials = 200;
  config.seed = 7;
  const auto rows = run_sweep(config);
  CHECK(rows.size() == 1);
  CHECK(rows[0].trials == 200);
}

TEST_CASE("default epsilon grid spans 0.01 to 16") {
  const auto grid = default_epsilon_grid();
  CHECK(grid.front() == doctest::Approx(0.01));
  CHECK(grid.back() == doctest::Approx(16.0));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] > grid[i - 1]);
  }
}

TEST_CASE("config files parse key=value pairs with comments") {
  std::istringstream in(
      "# sweep defaults\n"
      "seed = 42\n"
      "trials=100\n"
      "eps = 0.1,1,16\n"
      "\n"
      "mechanism = rnm,gem\n");
  const auto values = parse_config_file(in);
  CHECK(values.at("seed") == "42");
  CHECK(values.at("trials") == "100");
  CHECK(parse_double_list(values.at("eps")) ==
        std::vector<double>{0.1, 1.0, 16.0});

  std::istringstream bad("seed 42\n");
  CHECK_THROWS(parse_config_file(bad));
}
