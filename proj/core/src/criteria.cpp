#include "ends/criteria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "ends/geometry.hpp"
#include "ends/ode.hpp"
#include "ends/quadrature.hpp"

namespace ends {

std::string_view to_string(TailVerdict v) {
  switch (v) {
    case TailVerdict::Convergent: return "Convergent";
    case TailVerdict::Divergent: return "Divergent";
    default: return "Inconclusive";
  }
}

std::string_view to_string(CriterionVerdict v) {
  return v == CriterionVerdict::Solvable ? "Solvable" : "NotEstablished";
}

namespace {

constexpr double kEulerE = 2.718281828459045235;
// exp(1/t) overflows past ~709; below t = 1/kLogCutoff the transformed
// integrand is continued linearly instead of sampled (see tail_integral_from).
constexpr double kLogCutoff = 600.0;

double phi_at(const WarpField& f, double r) { return f.value.eval_unchecked(r); }

/// Integrand of int 1/phi_bar after s = exp(1/t): value (s / phi_bar(s)) / t^2.
double transformed_integrand(const WarpField& f, double t) {
  if (t <= 0.0) return 0.0;
  const double inv = 1.0 / t;
  if (inv > kLogCutoff) return 0.0;
  const double s = std::exp(inv);
  const double v = (s / phi_at(f, s)) * inv * inv;
  return std::isfinite(v) ? v : 0.0;
}

}  // namespace

double tail_integral_from(const WarpField& phi_bar, double r, double* error) {
  double value = 0.0, err = 0.0;
  double split = r;
  if (r < kEulerE) {
    const auto head = integrate(
        [&phi_bar](double s) { return 1.0 / phi_at(phi_bar, s); }, r, kEulerE,
        1e-13, 1e-13);
    value += head.value;
    err += head.error;
    split = kEulerE;
  }
  const double t_top = 1.0 / std::log(split);
  const double t_min = std::min(1.0 / kLogCutoff, t_top);
  if (t_top > t_min) {
    const auto tail = integrate(
        [&phi_bar](double t) { return transformed_integrand(phi_bar, t); },
        t_min, t_top, 1e-13, 1e-13);
    value += tail.value;
    err += tail.error;
  }
  // Below t_min the radius exp(1/t) is not representable. Continue the
  // transformed integrand linearly through its last two samples: exact for
  // r log^2 r tails (the integrand is constant 1 there), vanishing for true
  // power tails, and the slope mismatch is charged to the error bound.
  const double g1 = transformed_integrand(phi_bar, t_min);
  const double g2 = transformed_integrand(phi_bar, 2.0 * t_min);
  const double stub = t_min * (3.0 * g1 - g2) / 2.0;
  value += std::clamp(stub, 0.0, t_min * std::max(g1, g2));
  err += t_min * std::abs(g1 - g2);
  if (error) *error = err;
  return value;
}

TailIntegral tail_integral(const WarpField& phi_bar, double r0, double r_max,
                           long budget) {
  TailIntegral out;
  if (!(r0 >= 0.0) || !(r_max > r0)) {
    out.note = "invalid radial window";
    return out;
  }

  // Growth exponent from the last decade of radii where phi_bar is finite.
  const int n_scan = 97;
  const double lo = std::max(r0, 1e-3);
  std::vector<double> radii(n_scan);
  for (int i = 0; i < n_scan; ++i)
    radii[static_cast<std::size_t>(i)] =
        lo * std::pow(r_max / lo, static_cast<double>(i) / (n_scan - 1));
  int last_finite = -1;
  for (int i = n_scan - 1; i >= 0; --i) {
    const double v = phi_at(phi_bar, radii[static_cast<std::size_t>(i)]);
    if (std::isfinite(v) && v > 0.0) {
      last_finite = i;
      break;
    }
  }
  if (last_finite < 0) {
    out.note = "phi_bar non-finite or non-positive over the whole scan";
    return out;
  }
  const double fit_hi = radii[static_cast<std::size_t>(last_finite)];
  const double fit_lo = std::max(lo, fit_hi / 10.0);
  if (!(fit_hi > fit_lo * 1.5)) {
    out.note = "no usable decade for the growth fit";
    return out;
  }
  const int n_fit = 24;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n_fit; ++i) {
    const double r =
        fit_lo * std::pow(fit_hi / fit_lo, static_cast<double>(i) / (n_fit - 1));
    const double v = phi_at(phi_bar, r);
    if (!std::isfinite(v) || v <= 0.0) {
      out.note = "non-finite/non-positive sample inside the fit window";
      return out;
    }
    const double x = std::log(r), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n_fit * sxx - sx * sx;
  const double p = (n_fit * sxy - sx * sy) / denom;
  out.growth_exponent = p;

  // int r^{-p} diverges for every p <= 1, so a harmonic-or-slower fit is
  // decisive; just above 1 the fit cannot distinguish r^{1+eps} from
  // r log^q r, hence the one-sided undecidable band.
  if (p <= 1.0) {
    out.verdict = TailVerdict::Divergent;
    if (p >= 0.9) out.note = "harmonic-or-slower growth (p <= 1)";
    return out;
  }
  if (p <= 1.1) {
    out.verdict = TailVerdict::Inconclusive;
    out.note = "growth exponent in the undecidable band (1, 1.1]";
    return out;
  }
  out.verdict = TailVerdict::Convergent;
  double err = 0.0;
  out.value = tail_integral_from(phi_bar, r0, &err);
  out.error_bound = err;
  (void)budget;
  return out;
}

ComparisonWarp make_comparisonwarp_impl(const Expr& phi_bar, double r0,
                                        double validation_span, int samples) {
  const std::vector<std::string> no_coords;
  for (const char* name : {"theta", "u", "v"})
    if (phi_bar.depends_on(name))
      throw CriteriaError("comparison warp must be radial-only");
  ComparisonWarp cw;
  cw.phi_bar = make_warp_field(phi_bar, no_coords);
  cw.r0 = r0;
  for (int i = 0; i < samples; ++i) {
    const double r = r0 + validation_span * static_cast<double>(i) /
                              static_cast<double>(samples - 1);
    const double v = cw.phi_bar.eval({}, r);
    const double dv = cw.phi_bar.eval_d_r({}, r);
    if (!(v > 0.0))
      throw CriteriaError("phi_bar must be positive at r = " + std::to_string(r));
    if (!(dv / v > 0.0))
      throw CriteriaError("phi_bar log-derivative must be positive at r = " +
                          std::to_string(r));
  }
  cw.tail = tail_integral(cw.phi_bar, r0);
  return cw;
}

ComparisonWarp make_comparison_warp(const Expr& phi_bar, double r0,
                                    double validation_span, int samples) {
  return make_comparisonwarp_impl(phi_bar, r0, validation_span, samples);
}

ComparisonWarp make_comparison_warp(std::string_view text, double r0,
                                    double validation_span, int samples) {
  const std::vector<std::string> no_coords;
  return make_comparisonwarp_impl(parse_expr(text, no_coords), r0,
                                  validation_span, samples);
}

CriterionReport check_criterion(const EndSpec& end, const ComparisonWarp& comparison,
                                const SampleSpec& spec) {
  CriterionReport report;
  report.integral = comparison.tail;
  if (comparison.r0 < end.r_start) {
    report.diagnostics = "comparison r0 below the end's r_start";
    return report;
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> jitter(-0.45, 0.45);

  const double r_lo = std::max(comparison.r0, end.r_start);
  const double r_hi = r_lo + spec.radial_span;
  const double h_r = (r_hi - r_lo) / spec.radial;
  const int dim = end.cross_section.dimension();
  const int m1 = dim == 2 ? spec.cross_per_dim : 1;
  const double rel = 1e-12;

  bool domination = true, log_deriv = true;
  std::ostringstream first_violation;

  try {
    for (int k = 0; k < spec.radial && (domination || log_deriv); ++k) {
      double r = r_lo + (k + 0.5 + jitter(rng)) * h_r;
      r = std::min(std::max(r, r_lo), r_hi);
      const double pb = comparison.phi_bar.eval({}, r);
      const double pb_r = comparison.phi_bar.eval_d_r({}, r);
      const double lhs_log = pb_r / pb;
      if (!(lhs_log > 0.0)) {
        log_deriv = false;
        first_violation << "phi_bar_r/phi_bar <= 0 at r=" << r;
        break;
      }
      for (int j0 = 0; j0 < spec.cross_per_dim; ++j0) {
        for (int j1 = 0; j1 < m1; ++j1) {
          Omega w;
          w.w0 = end.cross_section.period(0) *
                 (j0 + 0.5 + jitter(rng)) / spec.cross_per_dim;
          if (dim == 2)
            w.w1 = end.cross_section.period(1) *
                   (j1 + 0.5 + jitter(rng)) / spec.cross_per_dim;
          const double phi = end.warp.eval(w, r);
          const double phi_r = end.warp.eval_d_r(w, r);
          if (domination && pb > phi * (1.0 + rel)) {
            domination = false;
            first_violation << "phi_bar > phi at (w0=" << w.w0 << ", r=" << r
                            << "): " << pb << " > " << phi;
          }
          if (log_deriv && lhs_log > phi_r / phi * (1.0 + rel) + 1e-15) {
            log_deriv = false;
            if (first_violation.tellp() == 0)
              first_violation << "log-derivative ordering fails at (w0=" << w.w0
                              << ", r=" << r << ")";
          }
          if (!domination && !log_deriv) break;
        }
        if (!domination && !log_deriv) break;
      }
    }
  } catch (const EvalError& e) {
    report.integral.verdict = TailVerdict::Inconclusive;
    report.diagnostics = std::string("evaluation error: ") + e.what();
    return report;
  }

  report.domination_ok = domination;
  report.log_derivative_ok = log_deriv;
  report.diagnostics = first_violation.str();
  report.overall = (domination && log_deriv &&
                    report.integral.verdict == TailVerdict::Convergent)
                       ? CriterionVerdict::Solvable
                       : CriterionVerdict::NotEstablished;
  return report;
}

std::string to_text(const CriterionReport& report) {
  std::ostringstream out;
  out.precision(12);
  out << "domination_ok: " << (report.domination_ok ? "true" : "false") << "\n"
      << "log_derivative_ok: " << (report.log_derivative_ok ? "true" : "false")
      << "\n"
      << "integral_verdict: " << to_string(report.integral.verdict) << "\n";
  if (report.integral.verdict == TailVerdict::Convergent) {
    out << "integral_value: " << report.integral.value << "\n"
        << "integral_error_bound: " << report.integral.error_bound << "\n";
  }
  out << "growth_exponent: " << report.integral.growth_exponent << "\n"
      << "overall: " << to_string(report.overall) << "\n";
  if (!report.diagnostics.empty()) out << "diagnostics: " << report.diagnostics << "\n";
  return out.str();
}

SturmResult sturm_compare(const SturmInput& input, int samples, double rel_tol) {
  if (!(input.b > input.a)) throw CriteriaError("empty comparison interval");
  SturmResult res;
  res.part_a_applicable = input.u0 <= input.v0 && input.u0p <= input.v0p;
  res.part_b_applicable = input.u0 > 0.0 && input.v0 > 0.0 &&
                          input.u0p / input.u0 <= input.v0p / input.v0;
  if (!res.part_a_applicable && !res.part_b_applicable)
    throw CriteriaError("initial data satisfies neither comparison ordering");

  std::vector<double> grid(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    grid[static_cast<std::size_t>(i)] =
        input.a + (input.b - input.a) * static_cast<double>(i + 1) /
                      static_cast<double>(samples);
    const double r = grid[static_cast<std::size_t>(i)];
    if (input.quotient_u(r) > input.quotient_v(r) + 1e-12)
      throw CriteriaError("quotient ordering q_u <= q_v fails at r = " +
                          std::to_string(r));
  }

  auto rhs = [&input](double t, const std::array<double, 4>& y,
                      std::array<double, 4>& dy) {
    dy[0] = y[1];
    dy[1] = input.quotient_u(t) * y[0];
    dy[2] = y[3];
    dy[3] = input.quotient_v(t) * y[2];
  };
  const auto path = integrate_dopri<4>(
      rhs, input.a, input.b, {input.u0, input.u0p, input.v0, input.v0p}, grid,
      rel_tol, 1e-14);

  for (const auto& s : path) {
    const double u = s.y[0], up = s.y[1], v = s.y[2], vp = s.y[3];
    if (res.part_a_applicable)
      res.violation_value = std::max(res.violation_value, u - v);
    if (res.part_b_applicable && u > 0.0 && v > 0.0)
      res.violation_log_deriv =
          std::max(res.violation_log_deriv, up / u - vp / v);
  }
  res.violation_value = std::max(res.violation_value, 0.0);
  res.violation_log_deriv = std::max(res.violation_log_deriv, 0.0);
  res.max_violation = 0.0;
  if (res.part_a_applicable)
    res.max_violation = std::max(res.max_violation, res.violation_value);
  if (res.part_b_applicable)
    res.max_violation = std::max(res.max_violation, res.violation_log_deriv);
  return res;
}

ComparisonWarp hyperbolic_comparison_warp(const EndSpec& end, double a,
                                          double validation_span,
                                          int cross_samples, int radial_samples) {
  if (!(a > 0.0))
    throw CriteriaError("curvature constant a must be positive (nonzero)");

  const int dim = end.cross_section.dimension();
  const int m0 = cross_samples;
  const int m1 = dim == 2 ? cross_samples : 1;

  // Curvature bound K <= -a^2 on the sampled closure of the end.
  for (int k = 0; k < radial_samples; ++k) {
    const double r = end.r_start + validation_span * static_cast<double>(k) /
                                       static_cast<double>(radial_samples - 1);
    const int mc0 = dim == 2 ? 16 : 64;
    const int mc1 = dim == 2 ? 16 : 1;
    for (int j0 = 0; j0 < mc0; ++j0) {
      for (int j1 = 0; j1 < mc1; ++j1) {
        Omega w{end.cross_section.period(0) * j0 / mc0,
                dim == 2 ? end.cross_section.period(1) * j1 / mc1 : 0.0};
        const double kappa = radial_sectional_curvature(end, w, r);
        if (kappa > -a * a + 1e-9) {
          std::ostringstream msg;
          msg << "curvature bound K <= -a^2 violated at (w0=" << w.w0
              << ", r=" << r << "): K = " << kappa;
          throw CriteriaError(msg.str());
        }
      }
    }
  }

  // The three strict upper bounds on alpha, minimized over the cross-section
  // at r = r_start.
  double min_phi = INFINITY, min_logd = INFINITY, min_phi_r = INFINITY;
  for (int j0 = 0; j0 < m0; ++j0) {
    for (int j1 = 0; j1 < m1; ++j1) {
      Omega w{end.cross_section.period(0) * j0 / m0,
              dim == 2 ? end.cross_section.period(1) * j1 / m1 : 0.0};
      const double phi = end.warp.eval(w, end.r_start);
      const double phi_r = end.warp.eval_d_r(w, end.r_start);
      min_phi = std::min(min_phi, phi);
      min_logd = std::min(min_logd, phi_r / phi);
      min_phi_r = std::min(min_phi_r, phi_r);
    }
  }
  const double b1 = min_phi / std::sinh(1.0);
  const double b2 = min_logd / a;
  const double b3 = min_phi_r / (a * std::cosh(1.0));
  if (!(b1 > 0.0) || !(b2 > 0.0) || !(b3 > 0.0))
    throw CriteriaError(
        "hyperbolic comparison needs phi, phi_r, phi_r/phi positive at r_start");
  const double alpha = 0.9 * std::min({b1, b2, b3});

  // alpha * sinh(a*(r - r_start) + 1): the argument is 1 at the end's start,
  // which is exactly where the alpha bounds pin value and slope below phi;
  // ordered initial data then propagates outward by Sturm comparison.
  Expr radial = make_variable("r");
  if (end.r_start != 0.0)
    radial = make_binary(ExprKind::Subtract, std::move(radial),
                         make_number(end.r_start));
  Expr expr = make_binary(
      ExprKind::Multiply, make_number(alpha),
      make_call(Func::Sinh,
                make_binary(ExprKind::Add,
                            make_binary(ExprKind::Multiply, make_number(a),
                                        std::move(radial)),
                            make_number(1.0))));
  return make_comparison_warp(expr, end.r_start, validation_span);
}

}  // namespace ends
