#include "ends/geometry.hpp"

#include <cmath>

namespace ends {

namespace {

double checked_phi(const EndSpec& end, Omega w, double r) {
  const double phi = end.warp.eval(w, r);
  if (!(phi > 0.0))
    throw EvalError("warp must be positive", serialize(end.warp.value_expr));
  return phi;
}

}  // namespace

double radial_sectional_curvature(const EndSpec& end, Omega w, double r) {
  const double phi = checked_phi(end, w, r);
  return -end.warp.eval_d_rr(w, r) / phi;
}

CurvatureSignProfile curvature_sign_profile(const EndSpec& end, double r_min,
                                            double r_max, int samples, Omega w) {
  CurvatureSignProfile profile;
  profile.samples.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double r =
        samples == 1 ? r_min
                     : r_min + (r_max - r_min) * static_cast<double>(i) /
                                   static_cast<double>(samples - 1);
    const double k = radial_sectional_curvature(end, w, r);
    const int sign = k > 0.0 ? 1 : (k < 0.0 ? -1 : 0);
    profile.samples.emplace_back(r, sign);
    profile.has_positive = profile.has_positive || sign > 0;
    profile.has_negative = profile.has_negative || sign < 0;
  }
  return profile;
}

LaplacianCoefficients laplacian_coefficients(const EndSpec& end, Omega w, double r) {
  const double phi = checked_phi(end, w, r);
  const int n = end.cross_section.manifold_dimension();
  LaplacianCoefficients c;
  c.c_r = (n - 1) * end.warp.eval_d_r(w, r) / phi;
  c.c_n = 1.0 / (phi * phi);
  // Angular drift (n-3)/phi^3 * grad_N phi, from the divergence form of the
  // operator: identically zero when n = 3.
  if (n != 3 && !end.warp.radial_only) {
    const double f = (n - 3) / (phi * phi * phi);
    for (int i = 0; i < end.cross_section.dimension(); ++i)
      c.c_grad[static_cast<std::size_t>(i)] = f * end.warp.eval_d_omega(i, w, r);
  }
  return c;
}

double christoffel_curvature_oracle(const EndSpec& end, Omega w, double r, double h) {
  // K = [d_r Gamma^r_{aa} - Gamma^r_{aa} * Gamma^a_{ra}] / phi^2 with
  // Gamma^r_{aa} = -phi phi_r; phi_r and the outer derivative are both
  // central differences, so the estimate never touches the symbolic d_r/d_rr.
  const auto phi = [&](double rr) { return end.warp.eval(w, rr); };
  const auto gamma_raa = [&](double rr) {
    const double dphi = (phi(rr + h) - phi(rr - h)) / (2.0 * h);
    return -phi(rr) * dphi;
  };
  const double p = checked_phi(end, w, r);
  const double dphi = (phi(r + h) - phi(r - h)) / (2.0 * h);
  const double d_gamma = (gamma_raa(r + h) - gamma_raa(r - h)) / (2.0 * h);
  const double gamma_ara = dphi / p;  // Gamma^a_{ra}
  return (d_gamma - gamma_raa(r) * gamma_ara) / (p * p);
}

}  // namespace ends
