#include <benchmark/benchmark.h>

#include "liesect/expr.hpp"
#include "liesect/section.hpp"
#include "liesect/verifier.hpp"

using namespace liesect;

namespace {

Matrix closed_frame() {
  Matrix f = Matrix::Zero(5, 2);
  f(0, 0) = 1.0;
  f(2, 0) = 1.0;
  f(3, 0) = 1.0;
  f(4, 1) = 1.0;
  return f;
}

Vector target() {
  Vector x(2);
  x << 0.2, -0.1;
  return x;
}

void BM_TriangularProduct(benchmark::State& state) {
  const GroupChart g = GroupChart::triangular_affine();
  Vector a(5), b(5);
  a << 1.1, 0.2, 0.9, 0.3, -0.1;
  b << 0.95, -0.1, 1.05, 0.2, 0.4;
  for (auto _ : state) benchmark::DoNotOptimize(g.mu(a, b));
}
BENCHMARK(BM_TriangularProduct);

void BM_CustomLeftTranslate(benchmark::State& state) {
  Vector e(2);
  e << 1, 0;
  const GroupChart g =
      GroupChart::custom({expr::parse("g1*h1"), expr::parse("g2 + g1*h2")}, e);
  Vector a(2), v(2);
  a << 1.2, 0.3;
  v << 0.5, -1.0;
  for (auto _ : state) benchmark::DoNotOptimize(g.left_translate(a, v));
}
BENCHMARK(BM_CustomLeftTranslate);

void BM_ParseEvaluate(benchmark::State& state) {
  const expr::Bindings b{{"g1", 1.1}, {"g2", 0.2}, {"h1", 0.9}, {"h2", -0.4}};
  for (auto _ : state) {
    const expr::Ast ast = expr::parse("g2 + g1 * h2 * exp(sin(h1) / 2) - log(1 + g1^2)");
    benchmark::DoNotOptimize(expr::evaluate(ast, b));
  }
}
BENCHMARK(BM_ParseEvaluate);

void BM_SectionEvaluate(benchmark::State& state) {
  const GroupChart g = GroupChart::triangular_affine();
  const FibrationChart p = FibrationChart::standard(g);
  const AlgebraFrame f(closed_frame());
  const Route route = state.range(0) == 0 ? Route::Exp : Route::Ode;
  SectionField sigma =
      route == Route::Exp ? build_section_exp(g, p, f, {}) : build_section_ode(g, p, f, {});
  sigma.set_caching(false);
  const Vector x = target();
  for (auto _ : state) benchmark::DoNotOptimize(sigma.evaluate(x));
  state.SetLabel(to_string(route));
}
BENCHMARK(BM_SectionEvaluate)->Arg(0)->Arg(1);

void BM_FunctionalGridReport(benchmark::State& state) {
  const GroupChart g = GroupChart::triangular_affine();
  const FibrationChart p = FibrationChart::standard(g);
  const AlgebraFrame f(closed_frame());
  for (auto _ : state) {
    const SectionField sigma = build_section_ode(g, p, f, {});
    const ResidualReport r = grid_report(Check::Functional, sigma,
                                         Region{Vector::Zero(2), 0.3},
                                         SampleSpec{static_cast<int>(state.range(0)), 0, 0, 0},
                                         1e-6);
    benchmark::DoNotOptimize(r.max_residual);
  }
}
BENCHMARK(BM_FunctionalGridReport)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
