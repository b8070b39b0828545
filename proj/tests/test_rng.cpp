#include <cmath>
#include <vector>

#include "doctest.h"
#include "dpselect/rng.hpp"

using dpselect::RngStream;

TEST_CASE("same seed and stream id replay the same sequence") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("different stream ids diverge") {
  RngStream a(42, 0);
  RngStream b(42, 1);
  int equal = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++equal;
  }
  CHECK(equal == 0);
}

TEST_CASE("uniform stays in the open unit interval with mean 1/2") {
  RngStream rng(1, 0);
  const int n = 1'000'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
}

TEST_CASE("uniform_index covers [0, n) evenly") {
  RngStream rng(3, 5);
  const std::size_t k = 6;
  const int n = 600'000;
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_index(k)];
  const double expected = static_cast<double>(n) / k;
  for (std::size_t i = 0; i < k; ++i) {
    CHECK(std::abs(counts[i] - expected) < 5.0 * std::sqrt(expected));
  }
}

TEST_CASE("substreams derived from distinct ids are distinct") {
  RngStream base(9, 100);
  RngStream s1 = base.substream(1);
  RngStream s2 = base.substream(2);
  CHECK(s1.next_u64() != s2.next_u64());
}
