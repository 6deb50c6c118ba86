#include <benchmark/benchmark.h>

#include "dpcp/dpcp.hpp"

namespace {

using namespace dpcp;

// Full-scale data: D=200, d=195, N=M=1500.
const DataMatrix& full_scale_data() {
  static const DataMatrix data = [] {
    const auto model = sample_haar_subspace(200, 195, 7);
    return generate_dataset(model, 1500, 1500, 8);
  }();
  return data;
}

void BM_Subgradient(benchmark::State& state) {
  const auto& data = full_scale_data();
  const Eigen::VectorXd b = Rng(1).unit_vector(200);
  for (auto _ : state) benchmark::DoNotOptimize(subgradient(data, b));
}
BENCHMARK(BM_Subgradient);

void BM_PsgmSingle(benchmark::State& state) {
  const auto& data = full_scale_data();
  SolverConfig cfg;
  cfg.schedule = state.range(0) ? StepSchedule::mbls() : StepSchedule{};
  const Eigen::VectorXd b0 = instance_initial_vector(200, 3, 0);
  for (auto _ : state) benchmark::DoNotOptimize(psgm_single(data, b0, cfg).b);
}
BENCHMARK(BM_PsgmSingle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PsgmMulti(benchmark::State& state) {
  const auto& data = full_scale_data();
  SolverConfig cfg;
  cfg.c_prime = 10;
  cfg.seed = 4;
  cfg.schedule = StepSchedule::mbls();
  cfg.workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(psgm_multi(data, cfg).B);
}
BENCHMARK(BM_PsgmMulti)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Rsgm(benchmark::State& state) {
  const auto& data = full_scale_data();
  for (auto _ : state) benchmark::DoNotOptimize(rsgm_run(data, static_cast<int>(state.range(0))).B);
}
BENCHMARK(BM_Rsgm)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_EstimateRank(benchmark::State& state) {
  const Eigen::MatrixXd B = Rng(5).normal_matrix(200, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_rank(B).rank);
}
BENCHMARK(BM_EstimateRank)->Arg(10)->Arg(30);

void BM_ContinuousRun(benchmark::State& state) {
  const auto model = sample_haar_subspace(20, 15, 1);
  const ContinuousProblem problem(model, 0.5);
  const Eigen::VectorXd b0 = Rng(2).unit_vector(20);
  for (auto _ : state) benchmark::DoNotOptimize(continuous_psgm_run(problem, b0).b);
}
BENCHMARK(BM_ContinuousRun);

}  // namespace

BENCHMARK_MAIN();
