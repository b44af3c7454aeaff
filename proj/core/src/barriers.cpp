#include "ends/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ends/geometry.hpp"
#include "ends/quadrature.hpp"

namespace ends {

namespace {

double wrap_delta(double x, double period) {
  if (period <= 0.0) return x;
  return x - period * std::round(x / period);
}

}  // namespace

CapChart make_cap_chart(const CrossSection& cross, Omega center, double half_w0,
                        double half_w1, const Expr* psi, int psi_samples) {
  const int dim = cross.dimension();
  CapChart chart;
  chart.cross = cross;
  chart.center = center;
  chart.half_widths = {half_w0, dim == 2 ? half_w1 : 0.0};
  for (int d = 0; d < dim; ++d) {
    const double w = chart.half_widths[static_cast<std::size_t>(d)];
    if (!(w > 0.0)) throw BarrierError("degenerate cap half-width");
    if (!(2.0 * w < cross.period(d)))
      throw BarrierError("cap is not strictly contained in the fundamental domain");
  }
  if (cross.kind == CrossKind::Circle &&
      chart.half_widths[0] > std::numbers::pi / 2.0 + 1e-15)
    throw BarrierError("interval cap half-width must be <= pi/2");

  if (psi != nullptr && !psi->empty()) {
    if (dim != 2)
      throw BarrierError("conformal factor is only supported on T^2 caps");
    const auto coords = cross.coord_names();
    chart.psi_expr = *psi;
    chart.psi = CompiledExpr(*psi, coords);
    double eta = INFINITY;
    for (int i = 0; i <= psi_samples; ++i) {
      for (int j = 0; j <= psi_samples; ++j) {
        Omega w{center.w0 - half_w0 + 2.0 * half_w0 * i / psi_samples,
                center.w1 - half_w1 + 2.0 * half_w1 * j / psi_samples};
        eta = std::min(eta, chart.psi.eval(0.0, w.w0, w.w1));
      }
    }
    if (!(eta > 0.0))
      throw BarrierError("conformal factor must be positive on the cap");
    chart.eta = eta;
  }
  return chart;
}

double CapEigenfunction::value(Omega w) const {
  double prod = 1.0;
  const double dw0 = wrap_delta(w.w0 - center.w0, periods[0]);
  prod *= std::cos(std::numbers::pi * dw0 / (2.0 * half_widths[0]));
  if (dim == 2) {
    const double dw1 = wrap_delta(w.w1 - center.w1, periods[1]);
    prod *= std::cos(std::numbers::pi * dw1 / (2.0 * half_widths[1]));
  }
  return -prod;
}

bool CapEigenfunction::contains(Omega w) const {
  const double dw0 = wrap_delta(w.w0 - center.w0, periods[0]);
  if (std::abs(dw0) > half_widths[0]) return false;
  if (dim == 2) {
    const double dw1 = wrap_delta(w.w1 - center.w1, periods[1]);
    if (std::abs(dw1) > half_widths[1]) return false;
  }
  return true;
}

CapEigenfunction cap_eigenfunction(const CapChart& chart) {
  CapEigenfunction eig;
  eig.dim = chart.cross.dimension();
  eig.center = chart.center;
  eig.half_widths = chart.half_widths;
  eig.periods = {chart.cross.period(0),
                 eig.dim == 2 ? chart.cross.period(1) : 0.0};
  double lambda_sq = 0.0;
  for (int d = 0; d < eig.dim; ++d) {
    const double k =
        std::numbers::pi / (2.0 * chart.half_widths[static_cast<std::size_t>(d)]);
    lambda_sq += k * k;
  }
  eig.lambda1 = std::sqrt(lambda_sq);
  eig.A = -1.0;
  return eig;
}

double SigmaProfile::value(double x) const {
  if (r.empty()) return 0.0;
  if (x <= r.front()) return sigma.front();
  if (x >= r.back()) return sigma.back();
  const auto it = std::upper_bound(r.begin(), r.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - r.begin());
  const double t = (x - r[i - 1]) / (r[i] - r[i - 1]);
  return sigma[i - 1] + t * (sigma[i] - sigma[i - 1]);
}

SigmaProfile sigma_profile(const ComparisonWarp& comparison, double lambda1,
                           std::span<const double> r_grid) {
  if (comparison.tail.verdict != TailVerdict::Convergent)
    throw BarrierError(
        "sigma profile needs a Convergent tail integral (verdict: " +
        std::string(to_string(comparison.tail.verdict)) + ")");
  if (r_grid.size() < 2 || !std::is_sorted(r_grid.begin(), r_grid.end()))
    throw BarrierError("sigma grid must be ascending with at least two nodes");

  SigmaProfile prof;
  prof.lambda1_eff = lambda1;
  prof.r.assign(r_grid.begin(), r_grid.end());
  prof.integral.resize(prof.r.size());
  prof.sigma.resize(prof.r.size());

  const WarpField& pb = comparison.phi_bar;
  double err_tail = 0.0;
  prof.integral.back() = tail_integral_from(pb, prof.r.back(), &err_tail);
  prof.quadrature_error = err_tail;
  for (std::size_t i = prof.r.size() - 1; i-- > 0;) {
    const auto piece = integrate(
        [&pb](double s) { return 1.0 / pb.value.eval_unchecked(s); },
        prof.r[i], prof.r[i + 1], 1e-14, 1e-13);
    prof.integral[i] = prof.integral[i + 1] + piece.value;
    prof.quadrature_error += piece.error;
  }
  for (std::size_t i = 0; i < prof.r.size(); ++i)
    prof.sigma[i] = std::exp(-lambda1 * prof.integral[i]);
  return prof;
}

Barrier build_barrier(const CapChart& chart, const ComparisonWarp& comparison,
                      std::span<const double> r_grid) {
  Barrier b;
  b.chart = chart;
  b.eig = cap_eigenfunction(chart);
  b.sigma = sigma_profile(comparison, b.eig.lambda1 / chart.eta, r_grid);
  b.phi_bar = comparison.phi_bar;
  b.r0 = r_grid.front();
  b.A = b.eig.A;
  return b;
}

Barrier barrier_2d(double theta0, const ComparisonWarp& comparison,
                   std::span<const double> r_grid) {
  const CapChart chart = make_cap_chart(CrossSection::circle(), Omega{theta0, 0.0},
                                        std::numbers::pi / 2.0);
  return build_barrier(chart, comparison, r_grid);
}

AuditReport audit_superharmonic(const Barrier& barrier, const EndSpec& end,
                                const AuditOptions& options) {
  const int dim = end.cross_section.dimension();
  const int n = end.cross_section.manifold_dimension();
  if (barrier.chart.has_psi() && n != 3)
    throw BarrierError("conformal-factor audits are only supported for n = 3");
  if (options.cap_nodes < 5)
    throw BarrierError("audit needs at least 5 angular nodes");

  AuditReport rep;
  rep.cap_nodes = options.cap_nodes;

  // Radial window: the sigma grid, optionally restricted to sigma >= floor.
  const auto& rg = barrier.sigma.r;
  std::size_t k_lo = 0;
  while (k_lo < rg.size() && barrier.sigma.sigma[k_lo] < options.sigma_floor)
    ++k_lo;
  if (rg.size() - k_lo < 5)
    throw BarrierError("audit radial window too short after sigma floor");
  rep.radial_nodes = rg.size() - k_lo;
  const double h_r = rg[k_lo + 1] - rg[k_lo];
  for (std::size_t k = k_lo + 1; k + 1 < rg.size(); ++k)
    if (std::abs((rg[k + 1] - rg[k]) - h_r) > 1e-9 * h_r)
      throw BarrierError("audit requires a uniform sigma grid");
  rep.h_radial = h_r;

  // Angular box: the cap scaled by angular_fraction, one-node stencil halo
  // stays inside the cap when the fraction is below 1.
  const int m = options.cap_nodes;
  std::array<double, 2> box{
      barrier.chart.half_widths[0] * options.angular_fraction,
      barrier.chart.half_widths[1] * options.angular_fraction};
  const double h0 = 2.0 * box[0] / (m - 1);
  const double h1 = dim == 2 ? 2.0 * box[1] / (m - 1) : 0.0;
  rep.h_angular = std::max(h0, h1);

  const double lambda_eff = barrier.sigma.lambda1_eff;  // lambda1 / eta
  const double lambda1 = barrier.eig.lambda1;
  rep.min_analytic_residual = INFINITY;
  rep.min_barrier_value = INFINITY;
  rep.max_discrete = -INFINITY;
  rep.min_discrete = INFINITY;

  auto node_w = [&](int j0, int j1) {
    Omega w;
    w.w0 = barrier.chart.center.w0 - box[0] + h0 * j0;
    if (dim == 2) w.w1 = barrier.chart.center.w1 - box[1] + h1 * j1;
    return w;
  };
  const int m1 = dim == 2 ? m : 1;

  // Theta_A on the box for one radial index.
  std::vector<double> theta(static_cast<std::size_t>(m) * m1);
  for (int j0 = 0; j0 < m; ++j0)
    for (int j1 = 0; j1 < m1; ++j1)
      theta[static_cast<std::size_t>(j0) * m1 + j1] =
          barrier.eig.value(node_w(j0, j1));

  std::ostringstream note;
  const bool radial_warp = end.warp.radial_only;
  for (std::size_t k = k_lo; k < rg.size(); ++k) {
    const double r = rg[k];
    const double sig = barrier.sigma.sigma[k];
    const bool k_interior = k > k_lo && k + 1 < rg.size();
    const double phib = barrier.phi_bar.eval({}, r);
    const double phib_r = barrier.phi_bar.eval_d_r({}, r);
    LaplacianCoefficients c_radial;
    if (radial_warp) c_radial = laplacian_coefficients(end, node_w(0, 0), r);
    for (int j0 = 0; j0 < m; ++j0) {
      for (int j1 = 0; j1 < m1; ++j1) {
        const Omega w = node_w(j0, j1);
        const double th = theta[static_cast<std::size_t>(j0) * m1 + j1];
        rep.min_barrier_value =
            std::min(rep.min_barrier_value, sig * th - barrier.A);
        const bool interior =
            k_interior && j0 > 0 && j0 + 1 < m && (dim == 1 || (j1 > 0 && j1 + 1 < m1));
        if (!interior) continue;

        const LaplacianCoefficients c =
            radial_warp ? c_radial : laplacian_coefficients(end, w, r);
        const double psi = barrier.chart.psi_at(w);
        if (rep.resolved &&
            (std::abs(c.c_r) * h_r > 2.0 ||
             std::abs(c.c_grad[0]) * h0 > 2.0 * c.c_n)) {
          rep.resolved = false;
          note << "stencil underresolved at r=" << r
               << " (|c_r| h = " << std::abs(c.c_r) * h_r << ")";
        }

        // Discrete Laplacian of Theta_A = sigma theta - A.
        const double s_m = barrier.sigma.sigma[k - 1];
        const double s_p = barrier.sigma.sigma[k + 1];
        double lap = th * (s_p - 2.0 * sig + s_m) / (h_r * h_r) +
                     c.c_r * th * (s_p - s_m) / (2.0 * h_r);
        const double th_m0 = theta[static_cast<std::size_t>(j0 - 1) * m1 + j1];
        const double th_p0 = theta[static_cast<std::size_t>(j0 + 1) * m1 + j1];
        double ang = (th_p0 - 2.0 * th + th_m0) / (h0 * h0);
        double drift = c.c_grad[0] * (th_p0 - th_m0) / (2.0 * h0);
        if (dim == 2) {
          const double th_m1 = theta[static_cast<std::size_t>(j0) * m1 + (j1 - 1)];
          const double th_p1 = theta[static_cast<std::size_t>(j0) * m1 + (j1 + 1)];
          ang += (th_p1 - 2.0 * th + th_m1) / (h1 * h1);
          drift += c.c_grad[1] * (th_p1 - th_m1) / (2.0 * h1);
        }
        lap += sig * (c.c_n / (psi * psi) * ang + drift);

        // Analytic counterpart: theta * bracket, with exact sigma derivatives
        // sigma' = lambda_eff sigma / phi_bar and
        // sigma'' = lambda_eff sigma (lambda_eff - phi_bar_r) / phi_bar^2.
        const double phi = end.warp.eval(w, r);
        const double sp = lambda_eff * sig / phib;
        const double spp =
            lambda_eff * sig * (lambda_eff - phib_r) / (phib * phib);
        const double bracket = spp + c.c_r * sp -
                               lambda1 * lambda1 * sig / (psi * psi * phi * phi);
        const double analytic = th * bracket;

        rep.min_analytic_residual = std::min(rep.min_analytic_residual, bracket);
        rep.max_discrete = std::max(rep.max_discrete, lap);
        rep.min_discrete = std::min(rep.min_discrete, lap);
        rep.max_truncation =
            std::max(rep.max_truncation, std::abs(lap - analytic));
      }
    }
  }
  rep.max_positive_part = std::max(0.0, rep.max_discrete);
  rep.barrier_center_top =
      barrier.sigma.sigma.back() * barrier.eig.value(barrier.chart.center) -
      barrier.A;
  rep.note = note.str();
  return rep;
}

std::string to_text(const AuditReport& report) {
  std::ostringstream out;
  out.precision(12);
  out << "max_discrete_laplacian: " << report.max_discrete << "\n"
      << "min_discrete_laplacian: " << report.min_discrete << "\n"
      << "max_positive_part: " << report.max_positive_part << "\n"
      << "max_truncation_vs_analytic: " << report.max_truncation << "\n"
      << "min_analytic_residual: " << report.min_analytic_residual << "\n"
      << "min_barrier_value: " << report.min_barrier_value << "\n"
      << "barrier_center_top: " << report.barrier_center_top << "\n"
      << "resolved: " << (report.resolved ? "true" : "false") << "\n"
      << "cap_nodes: " << report.cap_nodes << "\n"
      << "radial_nodes: " << report.radial_nodes << "\n"
      << "h_angular: " << report.h_angular << "\n"
      << "h_radial: " << report.h_radial << "\n";
  if (!report.note.empty()) out << "note: " << report.note << "\n";
  return out.str();
}

}  // namespace ends
