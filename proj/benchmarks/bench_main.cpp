#include <benchmark/benchmark.h>

#include <vector>

#include "qtrace/coeffs.hpp"
#include "qtrace/contour.hpp"
#include "qtrace/mcint.hpp"
#include "qtrace/qepver.hpp"
#include "qtrace/symcalc.hpp"

using namespace qtrace;

namespace {

const MultiPoly& example1() {
  static const MultiPoly p = parse_polynomial("x1^4+x2^4+x3^4+x4^4+x5^4+7*x1^2*x2^2", 5);
  return p;
}

void BM_ResidueClosedForm(benchmark::State& state) {
  const InversePowerF f(1.0, 7.0);
  const int k = static_cast<int>(state.range(0));
  double u = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(contour::J(k, 2, f, u, 1.3));
    u = u < 10 ? u * 1.01 : 0.5;
  }
}
BENCHMARK(BM_ResidueClosedForm)->Arg(0)->Arg(2)->Arg(5);

void BM_ResidueQuadrature(benchmark::State& state) {
  const InversePowerF f(1.0, 7.0);
  for (auto _ : state) benchmark::DoNotOptimize(contour::residue_by_quadrature(2, 2, f, 1.0, 1.3).value);
}
BENCHMARK(BM_ResidueQuadrature);

void BM_Parametrix(benchmark::State& state) {
  const int j = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(symcalc::generic_parametrix(j).back().size());
}
BENCHMARK(BM_Parametrix)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_PipelineDensity(benchmark::State& state) {
  const InversePowerF f(1.0, 7.0);
  const coeffs::CompiledDensity dens(coeffs::trace_density(2, 5), example1(), f);
  std::vector<double> x{0.3, -0.2, 0.5, 0.1, -0.7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(dens(x));
    x[0] += 1e-9;
  }
}
BENCHMARK(BM_PipelineDensity);

void BM_PrintedDensity(benchmark::State& state) {
  const coeffs::PrintedDensity dens(5, example1(), InversePowerF(1.0, 7.0));
  std::vector<double> x{0.3, -0.2, 0.5, 0.1, -0.7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(dens(x));
    x[0] += 1e-9;
  }
}
BENCHMARK(BM_PrintedDensity);

void BM_MonteCarlo(benchmark::State& state) {
  const coeffs::PrintedDensity dens(5, example1(), InversePowerF(1.0, 7.0));
  mcint::MCConfig c;
  c.n_samples = state.range(0);
  c.n_replicates = 4;
  c.cutoff_radius = 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(mcint::mc_integrate(dens, 5, c).mean);
  state.SetItemsProcessed(state.iterations() * c.n_samples * c.n_replicates);
}
BENCHMARK(BM_MonteCarlo)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_TraceIdentity(benchmark::State& state) {
  const auto p = qepver::random_pencil(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(qepver::trace_identity_residual(p, {-5.0, 5.0}, 3));
}
BENCHMARK(BM_TraceIdentity)->Arg(4)->Arg(8)->Arg(32);

}  // namespace
BENCHMARK_MAIN();
