#include <benchmark/benchmark.h>

#include "halfspace/classifier.hpp"
#include "halfspace/coefficient_system.hpp"
#include "halfspace/fourier.hpp"

using namespace halfspace;

namespace {

ProblemSpec model_spec() {
  ProblemSpec spec;
  spec.dimension = 2;
  spec.diffusion = DiffusionMatrix::identity(1);
  spec.source.set_cos(0, Expr::constant(2.0));
  spec.verification.grid = 65;
  apply_default_verification(spec);
  return spec;
}

void EvalDeepExpr(benchmark::State& state) {
  const Expr e =
      parse_expr("2/(1+x1^2)^2 - 4*x1/(1+x1^2)^2*atan(x1) + atan(x1)^2", 1);
  double x = 0.123;
  for (auto _ : state) {
    const double pt[1] = {x};
    benchmark::DoNotOptimize(e.eval(pt));
    x += 1e-6;
  }
}
BENCHMARK(EvalDeepExpr);

void DifferentiateAndSimplify(benchmark::State& state) {
  const Expr e = parse_expr("atan(x1)^2*(2 + sin(x1))", 1);
  for (auto _ : state) benchmark::DoNotOptimize(e.derivative(0).simplified());
}
BENCHMARK(DifferentiateAndSimplify);

void AnalyzeMode(benchmark::State& state) {
  TrigSeries s;
  s.set_cos(0, Expr::constant(2.0));
  s.set_cos(3, Expr::constant(-0.5));
  s.set_sin(5, Expr::constant(0.25));
  const StripSampler f = [&s](std::span<const double> xp, double xn) {
    return s.evaluate(xp, xn);
  };
  const std::vector<std::vector<double>> pts = {{0.0}, {1.0}, {-2.0}};
  for (auto _ : state)
    benchmark::DoNotOptimize(analyze_mode(f, 3, TrigKind::cosine, pts, 64));
}
BENCHMARK(AnalyzeMode);

void ApplyDivForm(benchmark::State& state) {
  const DiffusionMatrix A = DiffusionMatrix::scalar(parse_expr("1 + 0.5*sin(x1)", 1));
  const Expr e = parse_expr("atan(x1)^2", 1);
  for (auto _ : state) benchmark::DoNotOptimize(apply_div_form(A, e));
}
BENCHMARK(ApplyDivForm);

void ClassifyModelProblem(benchmark::State& state) {
  const ProblemSpec spec = model_spec();
  for (auto _ : state) benchmark::DoNotOptimize(classify(spec));
}
BENCHMARK(ClassifyModelProblem);

}  // namespace

BENCHMARK_MAIN();
