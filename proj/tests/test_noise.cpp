#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "dpselect/noise.hpp"
#include "dpselect/rng.hpp"

using namespace dpselect;
using namespace dpselect::noise;

TEST_CASE("exponential samples are nonnegative with the requested mean") {
  RngStream rng(1, 1);
  const int n = 1'000'000;
  double sum = 0.0;
  int below_mean = 0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_exponential(2.0, rng);
    REQUIRE(x >= 0.0);
    sum += x;
    if (x < 2.0) ++below_mean;
  }
  CHECK(sum / n == doctest::Approx(2.0).epsilon(0.005));  // +- 0.01
  // CDF at x = mean is 1 - 1/e.
  CHECK(static_cast<double>(below_mean) / n ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(0.008));  // +- 0.005
}

TEST_CASE("exponential rejects nonpositive mean") {
  RngStream rng(1, 2);
  CHECK_THROWS_AS(sample_exponential(0.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_exponential(-1.0, rng), std::invalid_argument);
}

TEST_CASE("laplace is symmetric with the analytic tail and variance") {
  RngStream rng(2, 1);
  const int n = 1'000'000;
  int negative = 0;
  int below_minus_one = 0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_laplace(1.0, rng);
    if (x < 0.0) ++negative;
    if (x < -1.0) ++below_minus_one;
  }
  CHECK(static_cast<double>(negative) / n ==
        doctest::Approx(0.5).epsilon(0.006));  // +- 0.003
  CHECK(static_cast<double>(below_minus_one) / n ==
        doctest::Approx(0.5 * std::exp(-1.0)).epsilon(0.016));  // +- 0.003

  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_laplace(3.0, rng);
    sum_sq += x * x;
  }
  CHECK(sum_sq / n == doctest::Approx(18.0).epsilon(0.02));  // 2 * scale^2
}

TEST_CASE("laplace rejects nonpositive scale") {
  RngStream rng(2, 2);
  CHECK_THROWS_AS(sample_laplace(0.0, rng), std::invalid_argument);
}

TEST_CASE("geometric stopping count has mean 1/gamma") {
  RngStream rng(3, 1);
  const int n = 1'000'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto k = sample_stopping_count(StoppingRule::geometric(0.5), rng);
    REQUIRE(k >= 1);
    sum += static_cast<double>(k);
  }
  CHECK(sum / n == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("gamma = 1 always stops after one draw") {
  RngStream rng(3, 9);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_stopping_count(StoppingRule::geometric(1.0), rng) == 1);
  }
}

TEST_CASE("logarithmic stopping (eta = 0) matches the closed-form mean") {
  RngStream rng(3, 2);
  const auto rule = StoppingRule::truncated_negative_binomial(0.5, 0.0);
  CHECK(stopping_mean(rule) == doctest::Approx(1.0 / std::log(2.0)));
  const int n = 1'000'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += static_cast<double>(sample_stopping_count(rule, rng));
  }
  CHECK(sum / n == doctest::Approx(1.0 / std::log(2.0)).epsilon(0.02));
}

TEST_CASE("eta = 1 pmf telescopes to the geometric pmf") {
  for (const double gamma : {0.05, 0.3, 0.5, 0.9}) {
    for (std::uint64_t k = 1; k <= 50; ++k) {
      const double tnb = truncated_negative_binomial_pmf(k, gamma, 1.0);
      const double geometric =
          gamma * std::pow(1.0 - gamma, static_cast<double>(k - 1));
      CHECK(tnb == doctest::Approx(geometric).epsilon(1e-12));
    }
  }
}

TEST_CASE("eta = 0 pmf matches the logarithmic distribution pointwise") {
  const double gamma = 0.3;
  const double p = 1.0 - gamma;
  for (std::uint64_t k = 1; k <= 50; ++k) {
    const double logarithmic =
        -std::pow(p, static_cast<double>(k)) /
        (static_cast<double>(k) * std::log(1.0 - p));
    CHECK(truncated_negative_binomial_pmf(k, gamma, 0.0) ==
          doctest::Approx(logarithmic).epsilon(1e-12));
  }
}

TEST_CASE("truncated negative binomial pmf sums to one") {
  for (const double eta : {-0.5, 0.0, 0.5, 1.0}) {
    for (const double gamma : {0.1, 0.5}) {
      double total = 0.0;
      std::uint64_t k = 1;
      while (total < 1.0 - 1e-10 && k < 20'000) {
        total += truncated_negative_binomial_pmf(k, gamma, eta);
        ++k;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("truncated negative binomial sampling matches its analytic mean") {
  RngStream rng(3, 3);
  for (const auto& [gamma, eta] : {std::pair{0.5, -0.5}, {0.05, 0.0},
                                   {0.5, 1.0}}) {
    const auto rule = StoppingRule::truncated_negative_binomial(gamma, eta);
    const int n = 200'000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      sum += static_cast<double>(sample_stopping_count(rule, rng));
    }
    CHECK(sum / n == doctest::Approx(stopping_mean(rule)).epsilon(0.02));
  }
}

TEST_CASE("normal quantile agrees with the error function") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.9599639845400545));
  CHECK(normal_quantile(0.1) == doctest::Approx(-1.2815515655446004));
  for (double p : {1e-9, 0.01, 0.3, 0.7, 0.99, 1.0 - 1e-9}) {
    const double x = normal_quantile(p);
    CHECK(0.5 * std::erfc(-x / std::sqrt(2.0)) == doctest::Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("truncated normal stays inside its support") {
  RngStream rng(4, 1);
  double min_seen = 1.0;
  double max_seen = 0.0;
  for (int i = 0; i < 50'000; ++i) {
    const double x = sample_truncated_normal(0.5, 1.0, 0.01, 0.7, rng);
    REQUIRE(x >= 0.01);
    REQUIRE(x <= 0.7);
    min_seen = std::min(min_seen, x);
    max_seen = std::max(max_seen, x);
  }
  CHECK(min_seen < 0.05);
  CHECK(max_seen > 0.65);
}

TEST_CASE("samplers replay bit-identically") {
  RngStream a(5, 1);
  RngStream b(5, 1);
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_exponential(1.5, a) == sample_exponential(1.5, b));
    CHECK(sample_laplace(2.5, a) == sample_laplace(2.5, b));
    CHECK(sample_normal(0.0, 1.0, a) == sample_normal(0.0, 1.0, b));
  }
}
