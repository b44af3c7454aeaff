#pragma once

// Pointwise geometry of g = dr^2 + phi(omega, r)^2 g_N: radial sectional
// curvature and Laplace-Beltrami coefficients.

#include <array>
#include <vector>

#include "ends/cross_section.hpp"

namespace ends {

struct LaplacianCoefficients {
  double c_rr = 1.0;                  // coefficient of d^2/dr^2
  double c_r = 0.0;                   // (n-1) phi_r / phi
  double c_n = 0.0;                   // 1 / phi^2, multiplies the flat cross-section Laplacian
  std::array<double, 2> c_grad{0.0, 0.0};  // (n-3)/phi^3 * grad_N phi; zero for n = 3
};

/// K(e_r, e_alpha) = -phi_rr / phi. Throws EvalError if phi <= 0 there.
double radial_sectional_curvature(const EndSpec& end, Omega w, double r);

struct CurvatureSignProfile {
  std::vector<std::pair<double, int>> samples;  // (r, sign in {-1,0,+1})
  bool has_positive = false;
  bool has_negative = false;
};

/// Signs of the radial curvature at `samples` uniformly spaced radii in
/// [r_min, r_max], evaluated at the cross-section point w.
CurvatureSignProfile curvature_sign_profile(const EndSpec& end, double r_min,
                                            double r_max, int samples,
                                            Omega w = {});

LaplacianCoefficients laplacian_coefficients(const EndSpec& end, Omega w, double r);

/// Curvature recomputed through the Christoffel symbols
/// Gamma^r_{aa} = -phi phi_r, Gamma^a_{ra} = phi_r / phi, with every radial
/// derivative replaced by a central difference of step h. Test oracle only;
/// accuracy O(h^2) and fully independent of the symbolic derivatives.
double christoffel_curvature_oracle(const EndSpec& end, Omega w, double r, double h);

}  // namespace ends
