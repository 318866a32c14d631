#include <benchmark/benchmark.h>

#include "dpr/conditions.hpp"
#include "dpr/rng.hpp"
#include "dpr/solver.hpp"

namespace {

using namespace dpr;

ProblemInstance bench_instance(int k, int n1, int m) {
  GeneratorNet net = sample_gaussian_net({k, {n1, 4 * n1}}, 1);
  MeasurementEnsemble ens = sample_measurements(m, 4 * n1, 2);
  Rng rng = make_rng(3);
  Eigen::VectorXd xs = random_unit_vector(k, rng);
  return make_noiseless_instance(std::move(net), std::move(ens), std::move(xs));
}

void BM_forward(benchmark::State& state) {
  const int n1 = static_cast<int>(state.range(0));
  GeneratorNet net = sample_gaussian_net({6, {n1, 4 * n1}}, 1);
  Rng rng = make_rng(2);
  Eigen::VectorXd x = random_unit_vector(6, rng);
  for (auto _ : state) benchmark::DoNotOptimize(forward(net, x));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_forward)->Arg(64)->Arg(256)->Arg(1024);

void BM_subgradient(benchmark::State& state) {
  const int n1 = static_cast<int>(state.range(0));
  ProblemInstance inst = bench_instance(6, n1, 4 * n1);
  Rng rng = make_rng(4);
  Eigen::VectorXd x = random_unit_vector(6, rng);
  for (auto _ : state) benchmark::DoNotOptimize(subgradient(inst, x));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_subgradient)->Arg(64)->Arg(256)->Arg(1024);

void BM_phi_apply_rank2(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng = make_rng(5);
  Eigen::VectorXd z = random_unit_vector(n, rng);
  Eigen::VectorXd w = random_unit_vector(n, rng);
  Eigen::VectorXd v = random_unit_vector(n, rng);
  PhiOperator phi = phi_operator(z, w);
  for (auto _ : state) benchmark::DoNotOptimize(phi.apply(v));
}
BENCHMARK(BM_phi_apply_rank2)->Arg(256)->Arg(4096)->Arg(65536);

void BM_wdc_pair(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng = make_rng(6);
  Eigen::MatrixXd w = gaussian_matrix(n, 4, 1.0 / std::sqrt(double(n)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(wdc_deviation(w, 1, 7));
}
BENCHMARK(BM_wdc_pair)->Arg(256)->Arg(1024)->Arg(4096);

void BM_tessellation_sweep(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  Rng rng = make_rng(8);
  Eigen::MatrixXd a = gaussian_matrix(m, 2, 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(tessellation_count(a, 2));
}
BENCHMARK(BM_tessellation_sweep)->Arg(16)->Arg(128)->Arg(1024);

void BM_solve_small(benchmark::State& state) {
  ProblemInstance inst = bench_instance(4, 48, 64);
  SolverConfig config;
  config.max_iters = 200;
  config.grad_tol = 1e-6;
  config.seed = 9;
  Rng rng = make_rng(10);
  Eigen::VectorXd x0 = random_unit_vector(4, rng);
  for (auto _ : state) benchmark::DoNotOptimize(solve(inst, config, x0));
}
BENCHMARK(BM_solve_small);

}  // namespace

BENCHMARK_MAIN();
