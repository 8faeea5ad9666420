#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "splinefit/splinefit.hpp"

namespace {

using namespace splinefit;

DataSet synthetic(int n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.3);
  Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = std::sin(6.0 * z(i)) + noise(rng);
  return DataSet(z, y);
}

const DataSet& enso() {
  static const DataSet data = load_csv(SPLINEFIT_DATA_DIR "/enso.csv", "", "");
  return data;
}

void BM_BasisVector(benchmark::State& state) {
  const auto family = state.range(0) == 0 ? Family::TruncatedPower : Family::BSpline;
  const DataSet data = synthetic(200);
  const BasisSpec spec = make_basis(family, 3, data.z(), static_cast<int>(state.range(1)));
  double z = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(basis_vector(z, spec));
    z += 0.001;
    if (z > 1.0) z = 0.0;
  }
}
BENCHMARK(BM_BasisVector)->ArgsProduct({{0, 1}, {10, 40, 160}});

void BM_DesignMatrix(benchmark::State& state) {
  const DataSet data = synthetic(static_cast<int>(state.range(0)));
  const BasisSpec spec = make_basis(Family::BSpline, 3, data.z(), 40);
  for (auto _ : state) benchmark::DoNotOptimize(design_matrix(data.z(), spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DesignMatrix)->RangeMultiplier(4)->Range(128, 8192);

void BM_SolvePls(benchmark::State& state) {
  const auto solver = state.range(0) == 0 ? Solver::NormalEquations : Solver::Augmented;
  const DataSet data = synthetic(1000);
  const int knots = static_cast<int>(state.range(1));
  const DesignMatrix Z = design_matrix(data.z(), make_basis(Family::BSpline, 3, data.z(), knots));
  const PenaltyMatrix K = difference_penalty(static_cast<int>(Z.values.cols()), 2);
  for (auto _ : state) benchmark::DoNotOptimize(solve_pls(Z.values, data.y(), K, 1.0, solver));
}
BENCHMARK(BM_SolvePls)->ArgsProduct({{0, 1}, {20, 80, 200}});

void BM_SelectLambdaEnso(benchmark::State& state) {
  const DataSet& data = enso();
  FitConfig config;
  config.basis = make_basis(Family::BSpline, 2, data.z(), static_cast<int>(state.range(0)));
  config.penalty = PenaltySpec::difference(1);
  for (auto _ : state) benchmark::DoNotOptimize(select_lambda(config, data, Criterion::GCV));
}
BENCHMARK(BM_SelectLambdaEnso)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_SimulatedQuantile(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  Eigen::MatrixXd cov(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) cov(i, j) = std::exp(-std::abs(i - j) / 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_max_quantile(cov, 0.05, 10000, 3));
}
BENCHMARK(BM_SimulatedQuantile)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
