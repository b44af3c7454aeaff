// Acceptance suite: one pass/fail line per numbered criterion, tolerances
// pinned in code. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ends/barriers.hpp"
#include "ends/criteria.hpp"
#include "ends/expr.hpp"
#include "ends/geometry.hpp"
#include "ends/grid.hpp"
#include "ends/io.hpp"
#include "ends/solver.hpp"

using namespace ends;

namespace {

const std::vector<std::string> kTheta = {"theta"};
const std::vector<std::string> kTorus = {"u", "v"};

struct Checker {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void check_le(double value, double bound, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: %.6g > %.6g", what.c_str(), value, bound);
    check(value <= bound, buf);
  }
  void check_ge(double value, double bound, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: %.6g < %.6g", what.c_str(), value, bound);
    check(value >= bound, buf);
  }
  void check_near(double value, double target, double tol, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: %.12g vs %.12g (tol %.3g)", what.c_str(),
                  value, target, tol);
    check(std::abs(value - target) <= tol, buf);
  }
};

std::vector<double> uniform_grid(double lo, double hi, int count) {
  std::vector<double> r(count);
  for (int i = 0; i < count; ++i)
    r[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  return r;
}

// Maximum-principle ledger shared with criterion 7: every Dirichlet solve the
// suite performs lands here with its data band.
struct BandRecord {
  std::string name;
  double u_min, u_max, data_min, data_max;
  bool ok() const {
    return u_min >= data_min - 1e-9 && u_max <= data_max + 1e-9;
  }
};
std::vector<BandRecord> g_bands;

void record_band(const std::string& name, double u_min, double u_max,
                 double data_min, double data_max) {
  g_bands.push_back({name, u_min, u_max, data_min, data_max});
}

void record_exhaust(const std::string& name, const ExhaustResult& res) {
  record_band(name, res.solution_min, res.solution_max, res.data_min, res.data_max);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// ---------------------------------------------------------------------------
// 1. Curvature formula vs the Christoffel finite-difference oracle.

void criterion_1(Checker& c) {
  struct WarpCase {
    const char* text;
    double r_start, expansive_from, r_lo, r_hi;
  };
  const WarpCase cases[] = {
      {"sinh(r+1)", 0.0, 0.0, 0.5, 8.0},
      {"r*log(r)^2", 2.0, 2.0, 2.5, 20.0},
      {"sin(r) + r*log(r)^2", 1.0, 1.0, 2.0, 20.0},
      {"cosh(r)", 0.0, 0.01, 0.5, 6.0},
      {"r", 1.0, 1.0, 1.5, 30.0},
  };
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  const double h1 = 1e-2, h2 = 5e-3;

  for (const auto& wc : cases) {
    EndSpec end = make_end_spec(CrossSection::circle(), wc.text, wc.r_start,
                                wc.expansive_from, 30.0);
    std::uniform_real_distribution<double> radius(wc.r_lo, wc.r_hi);
    std::vector<double> orders;
    int exact_hits = 0;
    for (int i = 0; i < 50; ++i) {
      const Omega w = {angle(rng), 0.0};
      const double r = radius(rng);
      const double k_exact = radial_sectional_curvature(end, w, r);
      const double e1 = std::abs(christoffel_curvature_oracle(end, w, r, h1) - k_exact);
      const double e2 = std::abs(christoffel_curvature_oracle(end, w, r, h2) - k_exact);
      if (e1 <= 1e-12) {
        ++exact_hits;  // oracle exact (e.g. phi linear); no order to measure
        continue;
      }
      orders.push_back(std::log2(e1 / std::max(e2, 1e-300)));
    }
    if (orders.size() >= 10) {
      c.check_ge(median(orders), 1.9,
                 std::string("median oracle order for ") + wc.text);
    } else {
      c.check(exact_hits == 50,
              std::string("oracle neither second-order nor exact for ") + wc.text);
    }
  }

  // phi = alpha sinh(a r + 1): the formula must return -a^2 to 1e-10.
  std::uniform_real_distribution<double> radius(0.5, 8.0);
  for (const double a : {0.5, 1.0, 2.0}) {
    char text[64];
    std::snprintf(text, sizeof text, "0.7*sinh(%g*r + 1)", a);
    EndSpec end = make_end_spec(CrossSection::circle(), text, 0.0, 0.0, 12.0);
    for (int i = 0; i < 10; ++i) {
      const double k = radial_sectional_curvature(end, {angle(rng), 0.0}, radius(rng));
      c.check_near(k, -a * a, 1e-10, "curvature of alpha*sinh(a r + 1)");
    }
  }
}

// ---------------------------------------------------------------------------
// 2. Laplacian coefficients: no gradient term at n = 3; constants are
// discrete-harmonic after assembly.

double constants_residual(const DiscreteProblem& P) {
  Eigen::VectorXd y = P.matrix * Eigen::VectorXd::Ones(P.matrix.rows());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (!P.boundary[static_cast<std::size_t>(i)])
      worst = std::max(worst, std::abs(y[i]));
  return worst;
}

void criterion_2(Checker& c) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);

  const auto torus = CrossSection::flat_torus(2.0 * M_PI, 2.0 * M_PI);
  const EndSpec ends3d[] = {
      make_end_spec(torus, "sinh(r+1)", 1.0, 1.0, 20.0),
      make_end_spec(torus, "(2 + 0.3*cos(u))*exp(r)", 0.0, 0.0, 10.0),
  };
  std::uniform_real_distribution<double> radius(1.5, 8.0);
  for (const auto& end : ends3d) {
    for (int i = 0; i < 50; ++i) {
      const auto lap =
          laplacian_coefficients(end, {angle(rng), angle(rng)}, radius(rng));
      c.check(lap.c_grad[0] == 0.0 && lap.c_grad[1] == 0.0,
              "gradient term must vanish identically at n = 3");
    }
  }

  auto h3 = make_single_end_config(
      make_end_spec(torus, "sinh(r+1)", 1.0, 1.0, 20.0),
      parse_expr("0", kTorus), parse_expr("cos(u)", kTorus));
  c.check_le(constants_residual(assemble(h3, 4.0, {24, 61, true})), 1e-12,
             "constants residual, hyperbolic torus end");

  auto plane = make_single_end_config(
      make_end_spec(CrossSection::circle(), "r", 1.0, 1.0, 60.0),
      parse_expr("0", kTheta), parse_expr("cos(theta)", kTheta));
  c.check_le(constants_residual(assemble(plane, 6.0, {64, 81, true})), 1e-12,
             "constants residual, flat plane");

  auto glued = make_two_ends_config(
      make_end_spec(CrossSection::circle(), "cosh(r)", 0.0, 0.01, 15.0),
      make_end_spec(CrossSection::circle(), "cosh(r)", 0.0, 0.01, 15.0),
      parse_expr("1 + cos(theta)", kTheta), parse_expr("0", kTheta));
  c.check_le(constants_residual(assemble(glued, 4.0, {64, 81, true})), 1e-12,
             "constants residual, glued cylinder");
}

// ---------------------------------------------------------------------------
// 3. Criterion verdicts and the closed-form tail value.

void criterion_3(Checker& c) {
  auto hyperbolic = make_end_spec(CrossSection::circle(), "sinh(r)", 0.5, 0.5);
  auto rep1 = check_criterion(hyperbolic, hyperbolic_comparison_warp(hyperbolic, 1.0));
  c.check(rep1.overall == CriterionVerdict::Solvable,
          "sinh r must be Solvable; diagnostics: " + rep1.diagnostics);

  auto oscillating =
      make_end_spec(CrossSection::circle(), "sin(r) + r*log(r)^2", 1.0, 1.0);
  auto rep2 = check_criterion(oscillating,
                              make_comparison_warp("sin(r) + r*log(r)^2", 10.0));
  c.check(rep2.overall == CriterionVerdict::Solvable,
          "sin r + r log^2 r must be Solvable; diagnostics: " + rep2.diagnostics);

  auto plane = make_end_spec(CrossSection::circle(), "r", 1.0, 1.0);
  auto rep3 = check_criterion(plane, make_comparison_warp("r", 1.0));
  c.check(rep3.integral.verdict == TailVerdict::Divergent,
          "flat-plane tail must be Divergent");
  c.check(rep3.overall == CriterionVerdict::NotEstablished,
          "flat plane must be NotEstablished");

  const auto cw = make_comparison_warp("r*log(r)^2", 2.0);
  c.check(cw.tail.verdict == TailVerdict::Convergent,
          "r log^2 r tail must be Convergent");
  c.check_near(cw.tail.value, 1.0 / std::log(2.0), 1e-8,
               "tail integral of r log^2 r from 2");
}

// ---------------------------------------------------------------------------
// 4. Barrier audit on the hyperbolic torus end and the 2-D r log^2 r end.

void criterion_4(Checker& c) {
  // Hyperbolic 3-manifold end over the torus, rectangle cap.
  {
    const auto torus = CrossSection::flat_torus(2.0 * M_PI, 2.0 * M_PI);
    auto end = make_end_spec(torus, "sinh(r+1)", 1.0, 1.0, 20.0);
    auto cw = make_comparison_warp("0.9*sinh(r+1)", 1.0);
    auto chart = make_cap_chart(torus, {M_PI, M_PI}, M_PI / 2, M_PI / 2);

    const int radial[] = {61, 121, 241};
    const int cap[] = {17, 33, 65};
    double trunc[3] = {0, 0, 0};
    for (int level = 0; level < 3; ++level) {
      auto grid = uniform_grid(1.0, 10.0, radial[level]);
      auto barrier = build_barrier(chart, cw, grid);
      auto audit = audit_superharmonic(barrier, end, {cap[level], 1.0, 0.0});
      c.check(audit.resolved, "hyperbolic audit underresolved: " + audit.note);
      c.check_ge(audit.min_barrier_value, 0.0, "hyperbolic barrier min value");
      c.check_le(audit.max_positive_part,
                 std::max(1e-9, 2.0 * audit.max_truncation),
                 "hyperbolic discrete superharmonicity");
      trunc[level] = audit.max_truncation;
      if (level == 2)
        c.check_le(audit.barrier_center_top, 1e-3,
                   "hyperbolic barrier top value at r_max");
    }
    c.check_ge(trunc[2], 1e-12, "hyperbolic truncation below roundoff floor");
    c.check_ge(std::log2(trunc[0] / trunc[1]), 1.8, "hyperbolic audit order 1->2");
    c.check_ge(std::log2(trunc[1] / trunc[2]), 1.8, "hyperbolic audit order 2->3");
  }

  // 2-D surface end, interval cap, audited on |theta| <= pi/3 where
  // sigma >= 1/2 holds throughout.
  {
    auto end = make_end_spec(CrossSection::circle(), "r*log(r)^2", 2.0, 2.0);
    auto cw = make_comparison_warp("r*log(r)^2", 2.0);

    const int radial[] = {29, 57, 113};
    const int cap[] = {17, 33, 65};
    double trunc[3] = {0, 0, 0};
    for (int level = 0; level < 3; ++level) {
      auto grid = uniform_grid(20.0, 48.0, radial[level]);
      auto barrier = barrier_2d(0.0, cw, grid);
      auto audit =
          audit_superharmonic(barrier, end, {cap[level], 2.0 / 3.0, 0.0});
      c.check(audit.resolved, "surface audit underresolved: " + audit.note);
      c.check_ge(audit.min_barrier_value, 0.0, "surface barrier min value");
      c.check_le(audit.max_positive_part, 2.0 * audit.max_truncation + 1e-12,
                 "surface discrete superharmonicity");
      trunc[level] = audit.max_truncation;
    }
    c.check_ge(trunc[2], 1e-12, "surface truncation below roundoff floor");
    c.check_ge(std::log2(trunc[0] / trunc[1]), 1.8, "surface audit order 1->2");
    c.check_ge(std::log2(trunc[1] / trunc[2]), 1.8, "surface audit order 2->3");

    // Boundary behavior at the cap center: Theta_A(p, r_max) = 1 - sigma(r_max)
    // with sigma = exp(-1/log r) here, so it decays to 0 like 1/log r_max.
    // Driving it under 1e-3 would need log r_max >= -1/log(1 - 1e-3), i.e.
    // r_max > e^999 -- outside double range. The 1e-3 top-value bound is
    // therefore asserted on the hyperbolic audit above, and here the decay is
    // pinned against the closed form instead (see the project notes).
    double previous = 1.0;
    for (const double r_max : {60.0, 600.0, 6000.0}) {
      auto grid = uniform_grid(4.5, r_max, 257);
      auto barrier = barrier_2d(0.0, cw, grid);
      const double top = barrier.value({0.0, 0.0}, r_max);
      c.check_near(top, 1.0 - std::exp(-1.0 / std::log(r_max)), 1e-6,
                   "surface barrier top value closed form");
      c.check_le(top, previous, "surface barrier top value must decay");
      previous = top;
    }
    char note[160];
    std::snprintf(note, sizeof note,
                  "note: surface Theta_A(p, r_max) = 1 - exp(-1/log r_max) "
                  "(%.4f at r_max = 6e3); the 1e-3 bound needs r_max > e^999",
                  previous);
    c.notes.push_back(note);
  }
}

// ---------------------------------------------------------------------------
// 5. Discrete solve vs the separable-mode oracle, plus the flat-plane
// closed form.

void criterion_5(Checker& c) {
  // sinh r end over the torus (n = 3), single-mode datum cos(u).
  {
    const auto torus = CrossSection::flat_torus(2.0 * M_PI, 2.0 * M_PI);
    auto end = make_end_spec(torus, "sinh(r)", 0.5, 0.5, 20.0);
    auto config = make_single_end_config(end, parse_expr("0", kTorus),
                                         parse_expr("cos(u)", kTorus));
    const double R = 6.0;
    const int cross[] = {16, 32, 64};
    const int radial[] = {65, 129, 257};
    double err[3] = {0, 0, 0};
    for (int level = 0; level < 3; ++level) {
      auto P = assemble(config, R, {cross[level], radial[level], true});
      auto u = solve(P);
      record_band("mode solve level " + std::to_string(level), u.minCoeff(),
                  u.maxCoeff(), config.data_min, config.data_max);

      std::vector<double> pts(P.grid.r.begin() + 1, P.grid.r.end());
      const auto h_exact = radial_mode_oracle(end, 1.0, R, pts);
      double worst = 0.0;
      for (std::size_t k = 1; k < P.grid.radial_count(); ++k)
        worst = std::max(
            worst, std::abs(u[static_cast<Eigen::Index>(P.grid.index(0, 0, k))] -
                            h_exact[k - 1]));
      err[level] = worst;
    }
    c.check_ge(err[2], 1e-9, "mode-oracle gap below measurement floor");
    c.check_ge(std::log2(err[0] / err[1]), 1.8, "mode solve order 1->2");
    c.check_ge(std::log2(err[1] / err[2]), 1.8, "mode solve order 2->3");
  }

  // Flat annulus: u = (r/R) cos(theta) is the exact solution once the inner
  // wall carries (r0/R) cos(theta).
  {
    auto end = make_end_spec(CrossSection::circle(), "r", 1.0, 1.0, 60.0);
    auto config = make_single_end_config(end, parse_expr("cos(theta)/4", kTheta),
                                         parse_expr("cos(theta)", kTheta));
    auto P = assemble(config, 4.0, {1280, 129, true});
    auto u = solve(P);
    record_band("flat annulus closed form", u.minCoeff(), u.maxCoeff(),
                config.data_min, config.data_max);
    double worst = 0.0;
    for (int j = 0; j < P.grid.m0; ++j) {
      const double cosj = std::cos(P.grid.h0 * j);
      for (std::size_t k = 0; k < P.grid.radial_count(); ++k)
        worst = std::max(
            worst, std::abs(u[static_cast<Eigen::Index>(P.grid.index(j, 0, k))] -
                            P.grid.r[k] / 4.0 * cosj));
    }
    c.check_le(worst, 1e-6, "flat-plane closed-form error");
  }
}

// ---------------------------------------------------------------------------
// 6. Solvable vs parabolic dichotomy through the exhaustion.

std::vector<ProbePoint> four_probes(double r) {
  std::vector<ProbePoint> probes;
  for (int i = 0; i < 4; ++i)
    probes.push_back({{2.0 * M_PI * i / 4.0, 0.0}, r});
  return probes;
}

void criterion_6(Checker& c) {
  // Solvable oscillating warp: probe values go Cauchy, changes decay
  // geometrically.
  {
    auto end =
        make_end_spec(CrossSection::circle(), "sin(r) + r*log(r)^2", 1.0, 1.0);
    auto config = make_single_end_config(end, parse_expr("0", kTheta),
                                         parse_expr("cos(theta)", kTheta));
    auto res = exhaust(config, {4.0, 6.0, 8.0, 10.0}, four_probes(2.0), 0.05,
                       {64, 129, true});
    record_exhaust("oscillating-warp exhaustion", res);
    c.check(res.verdict == ExhaustVerdict::Converged,
            "oscillating warp exhaustion must converge");
    for (std::size_t k = 2; k < res.trace.size(); ++k)
      c.check_le(res.trace[k].sup_change, 0.85 * res.trace[k - 1].sup_change,
                 "sup-change decay at step " + std::to_string(k));
  }

  // Flat plane: no convergence; the probe oscillation tracks r_probe / R_k.
  {
    auto end = make_end_spec(CrossSection::circle(), "r", 1.0, 1.0, 60.0);
    auto config = make_single_end_config(end, parse_expr("0", kTheta),
                                         parse_expr("cos(theta)", kTheta));
    const double r_probe = 2.0;
    auto res = exhaust(config, {6.0, 12.0, 24.0, 48.0}, four_probes(r_probe),
                       0.05, {64, 81, true});
    record_exhaust("flat-plane exhaustion", res);
    c.check(res.verdict == ExhaustVerdict::NotConverged,
            "flat-plane exhaustion must not converge");
    for (const auto& step : res.trace) {
      const double predicted = r_probe / step.truncation_radius;
      const double ratio = step.probe_oscillation / predicted;
      c.check(ratio >= 0.5 && ratio <= 2.0,
              "oscillation/prediction ratio " + std::to_string(ratio) +
                  " at R = " + std::to_string(step.truncation_radius));
    }
  }
}

// ---------------------------------------------------------------------------
// 7. Maximum principle across every solve in the suite.

void criterion_7(Checker& c) {
  // Bundled runs not exercised by the other criteria.
  {
    auto end = make_end_spec(CrossSection::circle(), "sinh(r)", 0.5, 0.5);
    auto config = make_single_end_config(end, parse_expr("0", kTheta),
                                         parse_expr("cos(theta)", kTheta));
    auto P = assemble(config, 6.0, {64, 97, true});
    auto u = solve(P);
    record_band("hyperbolic-plane solve", u.minCoeff(), u.maxCoeff(),
                config.data_min, config.data_max);
  }
  {
    const auto torus = CrossSection::flat_torus(2.0 * M_PI, 2.0 * M_PI);
    auto end = make_end_spec(torus, "sinh(r+1)", 1.0, 1.0, 20.0);
    auto config = make_single_end_config(end, parse_expr("0", kTorus),
                                         parse_expr("cos(u)", kTorus));
    std::vector<ProbePoint> probes;
    for (int i = 0; i < 4; ++i)
      probes.push_back({{2.0 * M_PI * i / 4.0, 0.0}, 2.0});
    auto res = exhaust(config, {4.0, 5.0, 6.0, 7.0}, probes, 0.05, {24, 61, true});
    record_exhaust("hyperbolic torus exhaustion", res);
    c.check(res.max_principle_ok, "torus exhaustion violates the data band");
  }
  {
    auto end = make_end_spec(CrossSection::circle(), "r*log(r)^2", 2.0, 2.0);
    auto config = make_single_end_config(end, parse_expr("0", kTheta),
                                         parse_expr("cos(theta)", kTheta));
    auto res = exhaust(config, {8.0, 16.0, 32.0, 64.0}, four_probes(4.0), 0.05,
                       {64, 129, true});
    record_exhaust("r log^2 r exhaustion", res);
    c.check(res.max_principle_ok, "surface exhaustion violates the data band");
  }

  c.check_ge(static_cast<double>(g_bands.size()), 8.0,
             "expected the suite to register at least eight solves");
  for (const auto& band : g_bands) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "%s: u in [%.12g, %.12g], data in [%.12g, %.12g]",
                  band.name.c_str(), band.u_min, band.u_max, band.data_min,
                  band.data_max);
    c.check(band.ok(), buf);
  }
}

// ---------------------------------------------------------------------------
// 8. Liouville witness on the two-ended cylinder.

void criterion_8(Checker& c) {
  auto plus = make_end_spec(CrossSection::circle(), "cosh(r)", 0.0, 0.01, 15.0);
  auto minus = make_end_spec(CrossSection::circle(), "cosh(r)", 0.0, 0.01, 15.0);
  auto config = make_two_ends_config(plus, minus,
                                     parse_expr("1 + cos(theta)", kTheta),
                                     parse_expr("0", kTheta));
  const double r_probe = 2.0;
  auto res = liouville_witness(config, {4.0, 6.0, 8.0, 10.0},
                               four_probes(r_probe), 0.05, {64, 81, true});
  record_exhaust("liouville witness", res.exhaust);

  c.check(res.exhaust.verdict == ExhaustVerdict::Converged,
          "witness exhaustion must converge");
  c.check(res.exhaust.max_principle_ok, "witness violates the data band");
  c.check_near(res.f_min, 0.0, 1e-12, "distinguished datum minimum");
  c.check_near(res.f_max, 2.0, 1e-12, "distinguished datum maximum");

  // Required separation: half the data oscillation damped by sigma(r_probe)
  // of the comparison warp 0.5 cosh r.
  auto cw = make_comparison_warp("0.5*cosh(r)", 1.0);
  auto sigma = sigma_profile(cw, 1.0, uniform_grid(1.0, 12.0, 45));
  const double osc = res.f_max - res.f_min;
  const double required = 0.5 * osc * sigma.value(r_probe);
  c.check_ge(res.separation, required, "witness separation");

  // The mode oracle pins the expected value: the angular mode of f carries
  // osc/2 * cos(theta), so the probes separate by osc * h_mode(r_probe).
  const auto h = radial_mode_oracle(config, 1.0, 10.0, {r_probe});
  const double predicted = osc * h[0];
  c.check_near(res.separation, predicted, 0.1 * predicted,
               "witness separation vs mode oracle");
}

// ---------------------------------------------------------------------------
// 9. Sturm comparison on randomized quotient pairs.

void criterion_9(Checker& c) {
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int i = 0; i < 20; ++i) {
    const double base = 0.3 + 1.5 * unit(rng);
    const double amp = 0.5 + unit(rng);
    const double freq = 1.0 + 2.0 * unit(rng);
    const double phase = 2.0 * M_PI * unit(rng);
    const double lift = 0.05 + 0.4 * unit(rng);
    const double wobble = 0.3 * unit(rng);
    const double wfreq = 0.5 + 2.0 * unit(rng);

    SturmInput input;
    input.a = 0.5;
    input.b = 3.0;
    input.quotient_u = [=](double r) {
      const double s = std::sin(freq * r + phase);
      return base + amp * s * s;
    };
    input.quotient_v = [=](double r) {
      const double s = std::sin(freq * r + phase);
      const double w = std::cos(wfreq * r);
      return base + amp * s * s + lift + wobble * w * w;
    };
    if (i % 2 == 0) {
      input.u0 = 0.1 + 0.2 * unit(rng);
      input.v0 = input.u0 + 0.3 * unit(rng);
      input.u0p = 0.2 + unit(rng);
      input.v0p = input.u0p + 0.5 * unit(rng);
    } else {
      input.u0 = 1.0;
      input.v0 = 0.5 + unit(rng);
      const double ru = 0.8 * unit(rng);
      const double rv = ru + 0.2 + 0.5 * unit(rng);
      input.u0p = ru * input.u0;
      input.v0p = rv * input.v0;
    }
    const auto res = sturm_compare(input, 768);
    c.check_le(res.max_violation, 1e-8,
               "randomized pair " + std::to_string(i));
  }

  // Hyperbolic comparison case: u = 0.9 sinh(r+1) below v = sinh(r+1), both
  // with quotient 1 (the ordering propagates outward untouched).
  SturmInput hyp;
  hyp.a = 1.0;
  hyp.b = 6.0;
  hyp.u0 = 0.9 * std::sinh(2.0);
  hyp.u0p = 0.9 * std::cosh(2.0);
  hyp.v0 = std::sinh(2.0);
  hyp.v0p = std::cosh(2.0);
  hyp.quotient_u = [](double) { return 1.0; };
  hyp.quotient_v = [](double) { return 1.0; };
  c.check_le(sturm_compare(hyp, 768).max_violation, 1e-8,
             "hyperbolic comparison case");

  // And the growth version sinh r vs sinh(2r)/2 (quotients 1 vs 4).
  SturmInput growth;
  growth.a = 1.0;
  growth.b = 5.0;
  growth.u0 = std::sinh(1.0);
  growth.u0p = std::cosh(1.0);
  growth.v0 = 0.5 * std::sinh(2.0);
  growth.v0p = std::cosh(2.0);
  growth.quotient_u = [](double) { return 1.0; };
  growth.quotient_v = [](double) { return 4.0; };
  c.check_le(sturm_compare(growth, 768).max_violation, 1e-8,
             "sinh r vs sinh(2r)/2");
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    double budget_seconds;
    std::function<void(Checker&)> run;
  };
  const Criterion criteria[] = {
      {"curvature formula vs Christoffel oracle", 5.0, criterion_1},
      {"Laplacian coefficients and discrete-harmonic constants", 5.0, criterion_2},
      {"criterion verdicts and closed-form tail value", 10.0, criterion_3},
      {"barrier superharmonicity audits", 60.0, criterion_4},
      {"solve vs mode oracle and flat-plane closed form", 120.0, criterion_5},
      {"solvable vs parabolic dichotomy", 180.0, criterion_6},
      {"maximum principle across the suite", 300.0, criterion_7},
      {"Liouville witness separation", 120.0, criterion_8},
      {"Sturm comparison violations", 10.0, criterion_9},
  };

  int failed = 0;
  int index = 0;
  for (const auto& criterion : criteria) {
    ++index;
    Checker checker;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(checker);
    } catch (const std::exception& e) {
      checker.failures.push_back(std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (elapsed >= criterion.budget_seconds) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "runtime %.1fs exceeds budget %.0fs",
                    elapsed, criterion.budget_seconds);
      checker.failures.push_back(buf);
    }
    const bool ok = checker.failures.empty();
    failed += ok ? 0 : 1;
    std::printf("[%s] criterion %d: %s (%.1fs)\n", ok ? "PASS" : "FAIL", index,
                criterion.label, elapsed);
    for (const auto& note : checker.notes) std::printf("    %s\n", note.c_str());
    for (const auto& failure : checker.failures)
      std::printf("    %s\n", failure.c_str());
    std::fflush(stdout);
  }

  if (failed != 0) {
    std::printf("%d of 9 criteria failed\n", failed);
    return 1;
  }
  std::printf("all 9 criteria passed\n");
  return 0;
}
