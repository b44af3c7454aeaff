#pragma once

// Adaptive Gauss-Kronrod 15(7) quadrature on finite intervals, plus a
// compactified variant for integrals over [a, inf).

#include <functional>

namespace ends {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // accumulated error estimate
  long evaluations = 0;
  bool converged = false;
};

/// Integrate f over [a, b]. Subdivides until the summed Kronrod error
/// estimate is below max(abs_tol, rel_tol * |value|) or the evaluation
/// budget runs out.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, double rel_tol = 1e-12,
                     long max_evaluations = 200000);

/// Integrate f over [a, inf) via the substitution x = a + t/(1-t) on [0,1).
/// Suitable for integrands with at least polynomial decay; the integrand is
/// treated as 0 wherever it evaluates non-finite (overflow far in the tail).
QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                 double abs_tol = 1e-12, double rel_tol = 1e-12,
                                 long max_evaluations = 200000);

}  // namespace ends
