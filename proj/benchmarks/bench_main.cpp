#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "kmrate/bounds.hpp"
#include "kmrate/special_fn.hpp"
#include "kmrate/stochastic.hpp"

using namespace kmrate;

namespace {

StepSchedule random_schedule(std::size_t n) { return StepSchedule::uniform_random(n + 1, RngStream{7, 0}); }

void BM_CTableReference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sched = random_schedule(n);
  for (auto _ : state) benchmark::DoNotOptimize(bounds::c_table(sched, n, bounds::CTableMethod::reference));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CTableReference)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void BM_CTableFast(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sched = random_schedule(n);
  for (auto _ : state) benchmark::DoNotOptimize(bounds::c_table(sched, n, bounds::CTableMethod::fast));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CTableFast)->RangeMultiplier(2)->Range(8, 1024)->Complexity();

void BM_PnExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sched = random_schedule(n);
  for (auto _ : state) benchmark::DoNotOptimize(bounds::pn_exact(sched, n));
}
BENCHMARK(BM_PnExact)->RangeMultiplier(4)->Range(16, 4096);

void BM_PoissonBinomialPmf(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RngEngine engine(RngStream{3, 0});
  std::vector<double> raw(n);
  for (auto& q : raw) q = engine.uniform();
  const stochastic::BernoulliVector p(std::move(raw));
  for (auto _ : state) benchmark::DoNotOptimize(stochastic::poisson_binomial_pmf(p));
}
BENCHMARK(BM_PoissonBinomialPmf)->RangeMultiplier(4)->Range(16, 4096);

void BM_WalkMonteCarlo(benchmark::State& state) {
  const auto sched = random_schedule(100);
  const auto shards = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(stochastic::simulate_walk_nonneg(sched, 100, 20000, RngStream{5, 0}, shards));
  }
}
BENCHMARK(BM_WalkMonteCarlo)->Arg(1)->Arg(4)->UseRealTime();

void BM_Hyp2F1Terminating(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(special_fn::hyp2f1_terminating(n, 0.37));
}
BENCHMARK(BM_Hyp2F1Terminating)->RangeMultiplier(4)->Range(4, 1024);

void BM_BesselPairScaled(benchmark::State& state) {
  const double z = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(special_fn::bessel_pair_scaled(z));
}
BENCHMARK(BM_BesselPairScaled)->Arg(1)->Arg(15)->Arg(25)->Arg(500);

void BM_Envelope(benchmark::State& state) {
  double z = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bounds::h_envelope(z));
    z = z > 600.0 ? 0.01 : z * 1.1;
  }
}
BENCHMARK(BM_Envelope);

}  // namespace
BENCHMARK_MAIN();
