#include <benchmark/benchmark.h>

#include "smsn/model.hpp"
#include "smsn/skewness.hpp"

namespace {

using namespace smsn;

SmsnParams skew_t(Index p, double nu) {
  SmsnParams params;
  params.location = Vector::Zero(p);
  Vector w(p);
  for (Index j = 0; j < p; ++j) w[j] = 1.0 + static_cast<double>(j % 5);
  params.scale = w.asDiagonal() * toeplitz_corr(-0.8, p) * w.asDiagonal();
  params.shape = Vector::Constant(p, 3.0 / std::sqrt(static_cast<double>(p)));
  params.mixing = InvSqrtChiSq{nu};
  return params;
}

void BM_Sample(benchmark::State& state) {
  const SmsnDistribution dist(skew_t(state.range(0), 8.0));
  RngStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(dist.sample(1000, rng));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Sample)->Arg(2)->Arg(10)->Arg(18);

void BM_EstimateMaxDirection(benchmark::State& state) {
  RngStream rng(2);
  const Matrix x = sample(skew_t(state.range(0), 100.0), 500, rng);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_max_direction(x));
}
BENCHMARK(BM_EstimateMaxDirection)->Arg(2)->Arg(10)->Arg(18)
    ->Unit(benchmark::kMillisecond);

void BM_MixtureDensity(benchmark::State& state) {
  SmsnParams params = skew_t(2, 4.0);
  const MixingDistribution laws[] = {InvSqrtChiSq{4.0}, SqrtGamma{2},
                                     InvPowUniform{5.0}};
  params.mixing = laws[state.range(0)];
  const SmsnDistribution dist(params);
  Vector x(2);
  x << 1.5, -0.7;
  for (auto _ : state) benchmark::DoNotOptimize(dist.mixture_density(x, 1e-8));
  state.SetLabel(std::string(family_name(params.mixing)));
}
BENCHMARK(BM_MixtureDensity)->DenseRange(0, 2);

void BM_SkewTClosedForm(benchmark::State& state) {
  const SmsnDistribution dist(skew_t(2, 4.0));
  Vector x(2);
  x << 1.5, -0.7;
  for (auto _ : state) benchmark::DoNotOptimize(dist.skew_t_density(x, 4.0));
}
BENCHMARK(BM_SkewTClosedForm);

void BM_ProjectionSkewness(benchmark::State& state) {
  const ProjectionSkewness skew(skew_t(state.range(0), 8.0));
  const Vector d = Vector::Ones(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(skew(d));
}
BENCHMARK(BM_ProjectionSkewness)->Arg(2)->Arg(3)->Arg(18);

}  // namespace

BENCHMARK_MAIN();
