#include <benchmark/benchmark.h>

#include <cmath>

#include "lagfront/fronts.hpp"
#include "lagfront/genfam.hpp"
#include "lagfront/geomapps.hpp"
#include "lagfront/odegallery.hpp"
#include "lagfront/pdechar.hpp"
#include "lagfront/poly.hpp"
#include "lagfront/versality.hpp"

using namespace lagfront;

namespace {

void BM_ParseExpression(benchmark::State& state) {
  const VariableSet vars = VariableSet::indexed("q", 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_expression("q1^5 + 3/2*q1^3*q2 - (q1 + q2)^4 + q2^2", vars));
  }
}
BENCHMARK(BM_ParseExpression);

void BM_CriticalSet(benchmark::State& state) {
  const GeneratingFamily fam = catalog_families::cusp();
  const Box xb(fam.box().begin() + 1, fam.box().end());
  const auto grid = box_grid(xb, static_cast<std::size_t>(state.range(0)));
  const auto q_seeds = box_grid(Box(fam.box().begin(), fam.box().begin() + 1), 9);
  for (auto _ : state) benchmark::DoNotOptimize(solve_critical_set(fam, grid, q_seeds));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * grid.size()));
}
BENCHMARK(BM_CriticalSet)->Arg(11)->Arg(41);

void BM_CuspCaustic(benchmark::State& state) {
  const GeneratingFamily fam = catalog_families::cusp();
  const auto seeds = box_grid(fam.box(), 7);
  TraceOptions opts;
  opts.step = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(caustic(fam, seeds, opts));
}
BENCHMARK(BM_CuspCaustic)->Unit(benchmark::kMillisecond);

void BM_CuspMaxwell(benchmark::State& state) {
  const GeneratingFamily fam = catalog_families::cusp();
  const Box xb(fam.box().begin() + 1, fam.box().end());
  const auto grid = box_grid(xb, 41);
  const auto q_seeds = box_grid(Box(fam.box().begin(), fam.box().begin() + 1), 9);
  const double cell = (xb[0].hi - xb[0].lo) / 40.0;
  for (auto _ : state) benchmark::DoNotOptimize(maxwell_set(fam, grid, q_seeds, cell));
}
BENCHMARK(BM_CuspMaxwell)->Unit(benchmark::kMillisecond);

void BM_EllipseParallels(benchmark::State& state) {
  const ParametricHypersurface ellipse = surfaces::ellipse(2.0, 1.0);
  std::vector<Vector> grid;
  for (int i = 0; i < 720; ++i) grid.push_back(Vector::Constant(1, 2.0 * M_PI * i / 720.0));
  std::vector<double> radii;
  for (int i = 0; i < 20; ++i) radii.push_back(-2.8 + 0.12 * i);
  for (auto _ : state) {
    for (const auto& pc : parallels(ellipse, radii, grid)) benchmark::DoNotOptimize(parallel_cusps(ellipse, pc));
  }
}
BENCHMARK(BM_EllipseParallels)->Unit(benchmark::kMillisecond);

void BM_BurgersSheet(benchmark::State& state) {
  const QuasiLinearPDE pde = pde_catalog::burgers(ScalarField(
      1, [](const Vector& p) { return std::sin(p(0)); }, {},
      [](const Vector& p) { return Vector::Constant(1, std::cos(p(0))); }));
  std::vector<Vector> grid;
  const auto strips = static_cast<std::size_t>(state.range(0));
  for (double x : linspace(0.0, 2.0 * M_PI, strips)) grid.push_back(Vector::Constant(1, x));
  for (auto _ : state) {
    const auto sheet = integrate_characteristics(pde, grid, {0.0, 1.0}, 1e-3);
    benchmark::DoNotOptimize(breaking_time(sheet));
  }
}
BENCHMARK(BM_BurgersSheet)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_GalleryDiscriminant(benchmark::State& state) {
  const IntegralDiagram d = gallery_family(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gallery_discriminant(d, {-1.0, 1.0}, GalleryOptions{}));
}
BENCHMARK(BM_GalleryDiscriminant)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_Versality(benchmark::State& state) {
  const unsigned mu = static_cast<unsigned>(state.range(0));
  const VariableSet vars = VariableSet::indexed("q", 1);
  const PolyExpr f = parse_expression("q1^" + std::to_string(mu + 1), vars);
  std::vector<PolyExpr> dfdx;
  for (unsigned j = 1; j < mu; ++j) dfdx.push_back(parse_expression("q1^" + std::to_string(j), vars));
  for (auto _ : state) benchmark::DoNotOptimize(sp_plus_versality_check(f, dfdx, default_jet_degree(f, 1), 1));
}
BENCHMARK(BM_Versality)->DenseRange(2, 5);

}  // namespace
BENCHMARK_MAIN();
