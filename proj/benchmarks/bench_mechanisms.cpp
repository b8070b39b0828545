#include <benchmark/benchmark.h>

#include <vector>

#include "dpselect/bandit.hpp"
#include "dpselect/mechanisms.hpp"
#include "dpselect/noise.hpp"
#include "dpselect/scenarios.hpp"

using namespace dpselect;

namespace {

SelectionProblem benchmark_problem(std::size_t k) {
  std::vector<double> scores(k);
  std::vector<double> sens(k);
  RngStream rng(1234, k);
  for (std::size_t a = 0; a < k; ++a) {
    scores[a] = rng.uniform() * 4.0 - 2.0;
    sens[a] = 0.2 + rng.uniform();
  }
  return make_problem(std::move(scores), std::move(sens));
}

void BM_SampleExponential(benchmark::State& state) {
  RngStream rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(noise::sample_exponential(2.0, rng));
  }
}
BENCHMARK(BM_SampleExponential);

void BM_SampleLaplace(benchmark::State& state) {
  RngStream rng(1, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(noise::sample_laplace(2.0, rng));
  }
}
BENCHMARK(BM_SampleLaplace);

void BM_Rnm(benchmark::State& state) {
  const auto problem = benchmark_problem(state.range(0));
  RngStream rng(2, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mechanisms::rnm(problem, 0.5, rng));
  }
}
BENCHMARK(BM_Rnm)->Arg(10)->Arg(100)->Arg(500);

void BM_GemTransform(benchmark::State& state) {
  const auto problem = benchmark_problem(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mechanisms::gem_transform(problem, 12.0));
  }
}
BENCHMARK(BM_GemTransform)->Arg(10)->Arg(100)->Arg(500);

void BM_Gem(benchmark::State& state) {
  const auto problem = benchmark_problem(state.range(0));
  RngStream rng(3, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mechanisms::gem(problem, 0.5, 0.05, rng));
  }
}
BENCHMARK(BM_Gem)->Arg(10)->Arg(100);

void BM_RsGamma(benchmark::State& state) {
  const auto problem = benchmark_problem(100);
  const auto stopping =
      noise::StoppingRule::geometric(1.0 / static_cast<double>(state.range(0)));
  RngStream rng(4, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mechanisms::rs_gamma(problem, 0.5, stopping, rng));
  }
}
BENCHMARK(BM_RsGamma)->Arg(10)->Arg(100);

void BM_PrivateCounterAdd(benchmark::State& state) {
  bandit::PrivateCounter counter(1.0);
  RngStream rng(5, 0);
  for (auto _ : state) {
    counter.add(0.5, rng);
    benchmark::DoNotOptimize(counter.query());
  }
}
BENCHMARK(BM_PrivateCounterAdd);

void BM_DpQuantile(benchmark::State& state) {
  std::vector<double> window(state.range(0));
  RngStream fill(6, 0);
  for (auto& v : window) v = fill.uniform();
  RngStream rng(6, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bandit::dp_quantile(window, 0.9, 0.5, rng));
  }
}
BENCHMARK(BM_DpQuantile)->Arg(200);

void BM_ScenarioTrialset(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(scenarios::gen_trialset_s5(7, 200));
  }
}
BENCHMARK(BM_ScenarioTrialset);

}  // namespace

BENCHMARK_MAIN();
