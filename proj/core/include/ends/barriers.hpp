#pragma once

// Explicit local barriers at points at infinity: Theta_A = sigma(r) * theta(omega) - A
// with a closed-form cap eigenfunction theta, the decay profile
// sigma(r) = exp(-int_r^inf lambda1 / phi_bar), and A = theta(center) = -1.
// The 2-D barrier is the same construction with an interval cap of half-width pi/2.

#include <span>
#include <string>

#include "ends/criteria.hpp"

namespace ends {

class BarrierError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CapChart {
  CrossSection cross;
  Omega center;
  std::array<double, 2> half_widths{0.0, 0.0};
  Expr psi_expr;     // conformal factor on the cap; empty means psi == 1
  CompiledExpr psi;  // compiled against the cross-section coordinates
  double eta = 1.0;  // inf of psi over the cap

  bool has_psi() const { return !psi_expr.empty(); }
  double psi_at(Omega w) const {
    return has_psi() ? psi.eval(0.0, w.w0, w.w1) : 1.0;
  }
};

/// Validates the cap: positive half-widths, strictly contained in the
/// fundamental domain (2w < period per dimension, and w <= pi/2 on S^1).
/// If psi is given, eta is its sampled infimum over the cap (must be > 0).
CapChart make_cap_chart(const CrossSection& cross, Omega center,
                        double half_w0, double half_w1 = 0.0,
                        const Expr* psi = nullptr, int psi_samples = 64);

struct CapEigenfunction {
  int dim = 1;
  Omega center;
  std::array<double, 2> half_widths{0.0, 0.0};
  std::array<double, 2> periods{0.0, 0.0};
  double lambda1 = 0.0;  // Delta_flat theta = -lambda1^2 theta
  double A = -1.0;       // theta(center)

  /// -prod_d cos(pi (w_d - center_d) / (2 half_d)), with periodic wrapping.
  double value(Omega w) const;
  bool contains(Omega w) const;
};

CapEigenfunction cap_eigenfunction(const CapChart& chart);

struct SigmaProfile {
  std::vector<double> r;         // ascending grid
  std::vector<double> integral;  // int_{r_i}^inf dr / phi_bar
  std::vector<double> sigma;     // exp(-lambda1_eff * integral)
  double lambda1_eff = 0.0;
  double quadrature_error = 0.0;

  /// Linear interpolation inside the grid, clamped outside.
  double value(double r) const;
};

/// sigma on r_grid, built from the tail-integral machinery. Refuses unless
/// the comparison's tail verdict is Convergent (sigma would vanish).
SigmaProfile sigma_profile(const ComparisonWarp& comparison, double lambda1,
                           std::span<const double> r_grid);

struct Barrier {
  CapChart chart;
  CapEigenfunction eig;
  SigmaProfile sigma;
  WarpField phi_bar;  // comparison warp backing sigma
  double r0 = 0.0;
  double A = -1.0;

  /// Theta_A(w, r) = sigma(r) theta(w) - A.
  double value(Omega w, double r) const {
    return sigma.value(r) * eig.value(w) - A;
  }
  double value_at_node(std::size_t k, Omega w) const {
    return sigma.sigma[k] * eig.value(w) - A;
  }
};

/// 3-D (or 2-D) barrier over the given cap. The sigma grid doubles as the
/// audit's radial grid. With a nontrivial conformal factor the comparison is
/// rescaled by eta (sigma exponent lambda1 / eta).
Barrier build_barrier(const CapChart& chart, const ComparisonWarp& comparison,
                      std::span<const double> r_grid);

/// The 2-D local barrier 1 - sigma(r) cos(theta - theta0): interval cap of
/// half-width pi/2 centered at theta0 (lambda1 = 1).
Barrier barrier_2d(double theta0, const ComparisonWarp& comparison,
                   std::span<const double> r_grid);

struct AuditOptions {
  int cap_nodes = 65;             // angular nodes per dimension across the audited box
  double angular_fraction = 1.0;  // audited box half-width as a fraction of the cap's
  double sigma_floor = 0.0;       // audit only radii with sigma >= floor
};

struct AuditReport {
  double max_discrete = 0.0;    // max over interior nodes of the discrete Laplacian
  double min_discrete = 0.0;
  double max_positive_part = 0.0;
  double max_truncation = 0.0;  // max |discrete - analytic|
  double min_analytic_residual = 0.0;  // min of the sufficient-inequality bracket
  double min_barrier_value = 0.0;      // min Theta_A over the audited box
  double barrier_center_top = 0.0;     // Theta_A(center, r_max)
  bool resolved = true;
  std::string note;
  int cap_nodes = 0;
  std::size_t radial_nodes = 0;
  double h_angular = 0.0;
  double h_radial = 0.0;
};

/// Discrete superharmonicity audit: second-order stencils of the warped
/// Laplacian applied to Theta_A at every interior node of the cap x radial
/// grid, against the analytic value theta * bracket with
/// bracket = sigma'' + (n-1)(phi_r/phi) sigma' - lambda1^2 sigma / (psi phi)^2.
AuditReport audit_superharmonic(const Barrier& barrier, const EndSpec& end,
                                const AuditOptions& options = {});

std::string to_text(const AuditReport& report);

}  // namespace ends
