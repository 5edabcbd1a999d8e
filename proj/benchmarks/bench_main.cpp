#include <benchmark/benchmark.h>

#include "mixedergo/ergodicity.hpp"
#include "mixedergo/kernel.hpp"
#include "mixedergo/mcmc.hpp"
#include "mixedergo/oracle.hpp"
#include "mixedergo/rng.hpp"
#include "mixedergo/special.hpp"

namespace {

using namespace mixedergo;

GlmmDesign twoway(int m, int n) {
  RngStream rng(42);
  Vector y(m * n);
  for (auto& v : y) v = rng.normal();
  return build_twoway(m, n, std::move(y));
}

const PriorSpec& diffuse_twoway() {
  static const PriorSpec p{0.0, 0.0, {-0.5, -0.5}, {0.0, 0.0}};
  return p;
}

void BM_GammaRatio(benchmark::State& state) {
  double x = 15.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gamma_ratio(x, 0.9));
    x += 1e-9;
  }
}
BENCHMARK(BM_GammaRatio);

void BM_Digamma(benchmark::State& state) {
  double x = 0.37;
  for (auto _ : state) {
    benchmark::DoNotOptimize(digamma(x));
    x += 1e-9;
  }
}
BENCHMARK(BM_Digamma);

void BM_SummarizeDesign(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const GlmmDesign d = twoway(m, m + 1);
  for (auto _ : state) benchmark::DoNotOptimize(summarize_design(d));
  state.SetComplexityN(m);
}
BENCHMARK(BM_SummarizeDesign)->RangeMultiplier(2)->Range(4, 32)->Complexity();

void BM_GibbsStep(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const GlmmDesign d = twoway(m, m + 1);
  const DesignSummary s = summarize_design(d);
  RngStream rng(7);
  ParamState st = default_initial_state(s);
  for (auto _ : state) {
    st = gibbs_step(st, s, d, diffuse_twoway(), rng);
    // Hand the sink a copy; the lvalue overload may write through its operand.
    const double se = st.sigma2.sigma2_e;
    benchmark::DoNotOptimize(se);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GibbsStep)->RangeMultiplier(2)->Range(4, 32);

void BM_WitnessSearch(benchmark::State& state) {
  const DesignSummary s = summarize_design(twoway(5, 6));
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(search_witness_s(s, diffuse_twoway(), grid));
}
BENCHMARK(BM_WitnessSearch)->Arg(512)->Arg(4096)->Arg(32768);

void BM_Certify(benchmark::State& state) {
  const GlmmDesign d = twoway(5, 6);
  for (auto _ : state) benchmark::DoNotOptimize(certify(d, diffuse_twoway()));
}
BENCHMARK(BM_Certify)->Unit(benchmark::kMillisecond);

void BM_EstimateK(benchmark::State& state) {
  const GlmmDesign d = twoway(5, 6);
  const DesignSummary s = summarize_design(d);
  const int budget = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_k(s, d, budget));
}
BENCHMARK(BM_EstimateK)->Arg(250)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_MarginalDensity(benchmark::State& state) {
  const GlmmDesign d = twoway(5, 6);
  const DesignSummary s = summarize_design(d);
  VarianceComponents v;
  v.sigma2_e = 1.3;
  v.sigma2_u = Vector::Constant(2, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(log_sigma2_marginal_density(s, diffuse_twoway(), v));
}
BENCHMARK(BM_MarginalDensity);

void BM_BatchMeans(benchmark::State& state) {
  RngStream rng(3);
  Vector x(state.range(0));
  for (auto& v : x) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(batch_means_mcse(x));
  state.SetBytesProcessed(state.iterations() * state.range(0) * static_cast<std::int64_t>(sizeof(double)));
}
BENCHMARK(BM_BatchMeans)->Arg(1 << 12)->Arg(1 << 18);

}  // namespace

BENCHMARK_MAIN();
