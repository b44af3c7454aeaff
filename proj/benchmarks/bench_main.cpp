#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ends/criteria.hpp"
#include "ends/expr.hpp"
#include "ends/geometry.hpp"
#include "ends/solver.hpp"

using namespace ends;

namespace {

const std::vector<std::string> kTheta = {"theta"};

void bm_expr_parse(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(
        parse_expr("sin(r) + r*log(r)^2 + 0.3*cos(theta)*exp(-r)", kTheta));
}
BENCHMARK(bm_expr_parse);

void bm_expr_compiled_eval(benchmark::State& state) {
  const Expr e = parse_expr("sin(r) + r*log(r)^2 + 0.3*cos(theta)*exp(-r)", kTheta);
  const CompiledExpr tape(e, kTheta);
  double r = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tape.eval_unchecked(r, 0.7, 0.0));
    r += 1e-6;
  }
}
BENCHMARK(bm_expr_compiled_eval);

void bm_curvature(benchmark::State& state) {
  const EndSpec end =
      make_end_spec(CrossSection::circle(), "sin(r) + r*log(r)^2", 1.0, 1.0);
  double r = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(radial_sectional_curvature(end, {0.3, 0.0}, r));
    r = r < 40.0 ? r + 1e-3 : 2.0;
  }
}
BENCHMARK(bm_curvature);

void bm_laplacian_coefficients(benchmark::State& state) {
  const auto torus = CrossSection::flat_torus(2.0 * M_PI, 2.0 * M_PI);
  const EndSpec end = make_end_spec(torus, "sinh(r+1)", 1.0, 1.0, 20.0);
  double r = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(laplacian_coefficients(end, {0.3, 1.1}, r));
    r = r < 10.0 ? r + 1e-3 : 2.0;
  }
}
BENCHMARK(bm_laplacian_coefficients);

void bm_assemble(benchmark::State& state) {
  const EndSpec end = make_end_spec(CrossSection::circle(), "r", 1.0, 1.0, 60.0);
  const auto config = make_single_end_config(end, parse_expr("0", kTheta),
                                             parse_expr("cos(theta)", kTheta));
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble(config, 6.0, {64, 81, true}));
}
BENCHMARK(bm_assemble);

void bm_solve(benchmark::State& state) {
  const EndSpec end = make_end_spec(CrossSection::circle(), "r", 1.0, 1.0, 60.0);
  const auto config = make_single_end_config(end, parse_expr("0", kTheta),
                                             parse_expr("cos(theta)", kTheta));
  const auto P = assemble(config, 6.0, {64, 81, true});
  for (auto _ : state) benchmark::DoNotOptimize(solve(P));
}
BENCHMARK(bm_solve);

void bm_tail_integral(benchmark::State& state) {
  const auto cw = make_comparison_warp("r*log(r)^2", 2.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(tail_integral(cw.phi_bar, 2.0));
}
BENCHMARK(bm_tail_integral);

void bm_sturm_compare(benchmark::State& state) {
  SturmInput input;
  input.a = 1.0;
  input.b = 5.0;
  input.u0 = std::sinh(1.0);
  input.u0p = std::cosh(1.0);
  input.v0 = 0.5 * std::sinh(2.0);
  input.v0p = std::cosh(2.0);
  input.quotient_u = [](double) { return 1.0; };
  input.quotient_v = [](double) { return 4.0; };
  for (auto _ : state) benchmark::DoNotOptimize(sturm_compare(input, 512));
}
BENCHMARK(bm_sturm_compare);

}  // namespace

BENCHMARK_MAIN();
