#include "doctest.h"

#include <cmath>
#include <vector>

#include "ends/solver.hpp"

using namespace ends;

namespace {

const std::vector<std::string> kTheta = {"theta"};

EndSpec circle_end(const char* warp, double r_start, double expansive_from,
                   double span = 30.0) {
  return make_end_spec(CrossSection::circle(), warp, r_start, expansive_from,
                       span);
}

Expr theta_expr(const char* text) { return parse_expr(text, kTheta); }

}  // namespace

TEST_CASE("graded radial nodes") {
  SUBCASE("nondecreasing profiles give exactly uniform spacing") {
    auto nodes = graded_radial_nodes([](double r) { return std::exp(r); }, 0.0,
                                     4.0, 17);
    REQUIRE(nodes.size() == 17);
    CHECK(nodes.front() == 0.0);
    CHECK(nodes.back() == 4.0);
    for (std::size_t k = 0; k < nodes.size(); ++k)
      CHECK(nodes[k] == doctest::Approx(0.25 * k).epsilon(1e-14));
  }
  SUBCASE("a dip in the profile attracts nodes") {
    // cosh(r-2) dips to 1 at r = 2 from 3.76 at the left edge.
    auto nodes = graded_radial_nodes(
        [](double r) { return std::cosh(r - 2.0); }, 0.0, 4.0, 33);
    REQUIRE(nodes.size() == 33);
    CHECK(nodes.front() == 0.0);
    CHECK(nodes.back() == 4.0);
    for (std::size_t k = 1; k < nodes.size(); ++k) CHECK(nodes[k] > nodes[k - 1]);
    // Compare the cell straddling the dip with the first cell.
    double dip = 1e9;
    for (std::size_t k = 1; k < nodes.size(); ++k)
      if (nodes[k - 1] <= 2.0 && 2.0 <= nodes[k]) dip = nodes[k] - nodes[k - 1];
    CHECK(dip < 0.7 * (nodes[1] - nodes[0]));
  }
  SUBCASE("degenerate requests are rejected") {
    CHECK_THROWS((void)graded_radial_nodes([](double) { return 1.0; }, 1.0, 1.0, 5));
    CHECK_THROWS((void)graded_radial_nodes([](double) { return 1.0; }, 0.0, 1.0, 1));
  }
}

TEST_CASE("constants are exactly harmonic in the discrete operator") {
  EndSpec end = circle_end("sinh(r)", 0.5, 0.5);
  auto config = make_single_end_config(end, theta_expr("0"), theta_expr("cos(theta)"));
  auto P = assemble(config, 4.0, {32, 33, true});
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(P.matrix.rows());
  Eigen::VectorXd y = P.matrix * ones;
  double interior_max = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (!P.boundary[static_cast<std::size_t>(i)])
      interior_max = std::max(interior_max, std::abs(y[i]));
  CHECK(interior_max <= 1e-12);
  CHECK(P.stencil_sign_ok);
}

TEST_CASE("flat annulus solve matches the closed form") {
  // u = (r/3) cos(theta) is harmonic on the flat plane; impose it on both
  // walls of the annulus [1, 3] and compare everywhere.
  EndSpec end = circle_end("r", 1.0, 1.0);
  auto config = make_single_end_config(end, theta_expr("cos(theta)/3"),
                                       theta_expr("cos(theta)"));
  auto P = assemble(config, 3.0, {64, 65, true});
  SolveStats stats;
  Eigen::VectorXd u = solve(P, 1e-10, 20000, &stats);
  CHECK(stats.converged);
  CHECK(stats.relative_residual <= 1e-10);

  double err = 0.0;
  for (int j = 0; j < P.grid.m0; ++j) {
    const double th = P.grid.h0 * j;
    for (std::size_t k = 0; k < P.grid.radial_count(); ++k) {
      const double exact = P.grid.r[k] / 3.0 * std::cos(th);
      err = std::max(err,
                     std::abs(u[static_cast<Eigen::Index>(P.grid.index(j, 0, k))] -
                              exact));
    }
  }
  CHECK(err < 1e-3);

  // Discrete maximum principle: the solve stays inside the data band.
  CHECK(u.maxCoeff() <= config.data_max + 1e-9);
  CHECK(u.minCoeff() >= config.data_min - 1e-9);
}

TEST_CASE("assemble reports stencil positivity loss with a remedy") {
  EndSpec end = circle_end("exp(6*r)", 0.0, 0.0, 10.0);
  auto config = make_single_end_config(end, theta_expr("0"), theta_expr("cos(theta)"));
  auto P = assemble(config, 4.0, {16, 5, false});  // h_r = 1, |c_r| h = 6
  CHECK_FALSE(P.stencil_sign_ok);
  CHECK(P.stencil_note.find("radial_nodes") != std::string::npos);
  CHECK(P.max_radial_drift_ratio > 1.0);
}

TEST_CASE("probe values snap angularly and interpolate radially") {
  EndSpec end = circle_end("r", 1.0, 1.0);
  auto config = make_single_end_config(end, theta_expr("0"), theta_expr("0"));
  auto P = assemble(config, 3.0, {8, 9, true});
  Eigen::VectorXd u(P.grid.node_count());
  for (int j = 0; j < P.grid.m0; ++j)
    for (std::size_t k = 0; k < P.grid.radial_count(); ++k)
      u[static_cast<Eigen::Index>(P.grid.index(j, 0, k))] =
          P.grid.r[k] + 10.0 * std::cos(P.grid.h0 * j);

  // Between radial nodes the field r is reproduced exactly.
  const double h0 = P.grid.h0;
  CHECK(probe_value(P.grid, u, {{2 * h0, 0.0}, 1.77}) ==
        doctest::Approx(1.77 + 10.0 * std::cos(2 * h0)).epsilon(1e-13));
  // Angular coordinates snap to the nearest node.
  CHECK(probe_value(P.grid, u, {{2 * h0 + 0.3 * h0, 0.0}, 2.0}) ==
        doctest::Approx(2.0 + 10.0 * std::cos(2 * h0)).epsilon(1e-13));
  // Periodic wrap: one full turn lands on the same node.
  CHECK(probe_value(P.grid, u, {{2 * h0 - 2 * M_PI, 0.0}, 2.0}) ==
        doctest::Approx(2.0 + 10.0 * std::cos(2 * h0)).epsilon(1e-13));
  // Radial clamping at the walls.
  CHECK(probe_value(P.grid, u, {{0.0, 0.0}, 0.2}) ==
        doctest::Approx(1.0 + 10.0).epsilon(1e-13));
}

TEST_CASE("radial mode oracle matches the flat closed form") {
  // h'' + h'/r - h/r^2 = 0 with h(1) = 0: h = (r - 1/r)/(R - 1/R).
  EndSpec end = circle_end("r", 1.0, 1.0);
  const double R = 4.0;
  const std::vector<double> pts = {1.5, 2.0, 3.0, 4.0};
  auto h = radial_mode_oracle(end, 1.0, R, pts);
  REQUIRE(h.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double exact = (pts[i] - 1.0 / pts[i]) / (R - 1.0 / R);
    CHECK(h[i] == doctest::Approx(exact).epsilon(1e-9));
  }
  CHECK(h.back() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-end gluing") {
  SUBCASE("symmetric glued manifold matches the conformal closed forms") {
    EndSpec plus = circle_end("cosh(r)", 0.0, 0.01);
    EndSpec minus = circle_end("cosh(r)", 0.0, 0.01);
    auto config = make_two_ends_config(plus, minus, theta_expr("cos(theta)"),
                                       theta_expr("0"));
    const std::vector<double> pts = {-1.0, 0.0, 1.0};

    // nu2 = 0: the equation for h' has no zeroth-order term, so the affine
    // symmetry h(t) + h(-t) = 1 of the even glued warp is exact.
    auto h0 = radial_mode_oracle(config, 0.0, 3.0, pts);
    REQUIRE(h0.size() == 3);
    CHECK(h0[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(h0[0] + h0[2] == doctest::Approx(1.0).epsilon(1e-9));

    // nu2 = 1: in the conformal coordinate x = gd(t) the surface cosh(t)
    // metric flattens and the mode solves h_xx = h, so
    // h(t) = sinh(gd(t) + gd(R)) / sinh(2 gd(R)).
    const auto gd = [](double t) { return std::asin(std::tanh(t)); };
    const double gR = gd(3.0);
    auto h1 = radial_mode_oracle(config, 1.0, 3.0, pts);
    REQUIRE(h1.size() == 3);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double exact = std::sinh(gd(pts[i]) + gR) / std::sinh(2.0 * gR);
      CHECK(h1[i] == doctest::Approx(exact).epsilon(1e-9));
    }

    CHECK(glued_warp(config, {}, -2.0) == doctest::Approx(std::cosh(2.0)));
    CHECK(glued_warp_d_t(config, {}, -2.0) ==
          doctest::Approx(-std::sinh(2.0)).epsilon(1e-13));
  }
  SUBCASE("value mismatch at the neck is rejected") {
    EndSpec plus = circle_end("cosh(r)", 0.0, 0.01);
    EndSpec minus = circle_end("2+r^2", 0.0, 0.01);
    CHECK_THROWS_AS((void)make_two_ends_config(plus, minus, theta_expr("1"),
                                               theta_expr("0")),
                    SolverError);
  }
  SUBCASE("slope mismatch at the neck is rejected") {
    EndSpec plus = circle_end("cosh(r)", 0.0, 0.01);
    EndSpec minus = circle_end("1+r", 0.0, 0.0);
    CHECK_THROWS_AS((void)make_two_ends_config(plus, minus, theta_expr("1"),
                                               theta_expr("0")),
                    SolverError);
  }
  SUBCASE("ends must start at zero") {
    EndSpec plus = circle_end("cosh(r)", 0.0, 0.01);
    EndSpec shifted = circle_end("cosh(r)", 0.5, 0.5);
    CHECK_THROWS_AS((void)make_two_ends_config(plus, shifted, theta_expr("1"),
                                               theta_expr("0")),
                    SolverError);
  }
}

TEST_CASE("exhaustion") {
  SUBCASE("single-mode datum on a cosh funnel converges") {
    EndSpec end = circle_end("cosh(r)", 0.0, 0.01);
    auto config = make_single_end_config(end, theta_expr("0"),
                                         theta_expr("cos(theta)"));
    std::vector<ProbePoint> probes;
    for (int i = 0; i < 4; ++i)
      probes.push_back({{2.0 * M_PI * i / 4.0, 0.0}, 1.0});
    auto res = exhaust(config, {3.0, 4.0, 5.0, 6.0}, probes, 0.05, {32, 49, true});
    CHECK(res.verdict == ExhaustVerdict::Converged);
    REQUIRE(res.trace.size() >= 3);
    CHECK(std::isnan(res.trace.front().sup_change));
    CHECK(res.trace.back().sup_change < 0.05);
    CHECK(res.trace[res.trace.size() - 2].sup_change < 0.05);
    CHECK(res.max_principle_ok);
    CHECK(res.probe_values.size() == probes.size());
    CHECK(res.trace.back().probe_oscillation > 0.0);
    CHECK(res.solution_min >= config.data_min - 1e-9);
    CHECK(res.solution_max <= config.data_max + 1e-9);
  }
  SUBCASE("flat plane keeps drifting") {
    EndSpec end = circle_end("r", 1.0, 1.0);
    auto config = make_single_end_config(end, theta_expr("0"),
                                         theta_expr("cos(theta)"));
    std::vector<ProbePoint> probes;
    for (int i = 0; i < 4; ++i)
      probes.push_back({{2.0 * M_PI * i / 4.0, 0.0}, 2.0});
    auto res = exhaust(config, {6.0, 12.0, 24.0}, probes, 0.05, {32, 41, true});
    CHECK(res.verdict == ExhaustVerdict::NotConverged);
    // u_R(2, 0) = 1.5 / (R - 1/R); the probe change tracks the closed form.
    CHECK(res.trace[1].sup_change ==
          doctest::Approx(9.0 / 35.0 - 18.0 / 143.0).epsilon(0.02));
    CHECK(res.trace[2].sup_change ==
          doctest::Approx(18.0 / 143.0 - 36.0 / 575.0).epsilon(0.02));
  }
  SUBCASE("probes outside the first truncation are rejected") {
    EndSpec end = circle_end("r", 1.0, 1.0);
    auto config = make_single_end_config(end, theta_expr("0"), theta_expr("1"));
    std::vector<ProbePoint> probes = {{{0.0, 0.0}, 7.0}};
    CHECK_THROWS_AS(
        (void)exhaust(config, {6.0, 12.0}, probes, 0.05, {16, 17, true}),
        SolverError);
  }
}

TEST_CASE("liouville witness") {
  SUBCASE("constant data cannot separate") {
    EndSpec plus = circle_end("cosh(r)", 0.0, 0.01);
    EndSpec minus = circle_end("cosh(r)", 0.0, 0.01);
    auto config = make_two_ends_config(plus, minus, theta_expr("1"),
                                       theta_expr("0"));
    std::vector<ProbePoint> probes;
    for (int i = 0; i < 4; ++i)
      probes.push_back({{2.0 * M_PI * i / 4.0, 0.0}, 1.0});
    auto res = liouville_witness(config, {3.0, 4.0, 5.0}, probes, 0.5,
                                 {16, 25, true});
    CHECK(res.f_min == doctest::Approx(1.0));
    CHECK(res.f_max == doctest::Approx(1.0));
    // The pinned problem has constant data 1 on both ends.
    CHECK(res.separation <= 1e-10);
    CHECK(res.exhaust.solution_min >= 1.0 - 1e-9);
    CHECK(res.exhaust.solution_max <= 1.0 + 1e-9);
  }
  SUBCASE("requires two ends") {
    EndSpec end = circle_end("cosh(r)", 0.0, 0.01);
    auto config = make_single_end_config(end, theta_expr("0"), theta_expr("1"));
    std::vector<ProbePoint> probes = {{{0.0, 0.0}, 1.0}};
    CHECK_THROWS_AS(
        (void)liouville_witness(config, {3.0, 4.0}, probes, 0.5, {16, 17, true}),
        SolverError);
  }
}

TEST_CASE("solve rejects grids that are too small") {
  EndSpec end = circle_end("r", 1.0, 1.0);
  auto config = make_single_end_config(end, theta_expr("0"), theta_expr("1"));
  CHECK_THROWS_AS((void)assemble(config, 3.0, {3, 9, true}), SolverError);
  CHECK_THROWS_AS((void)assemble(config, 3.0, {8, 2, true}), SolverError);
  CHECK_THROWS_AS((void)assemble(config, 0.5, {8, 9, true}), SolverError);
}
