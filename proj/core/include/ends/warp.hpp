#pragma once

// A warp function phi(omega, r) bundled with its exact symbolic derivatives,
// compiled for fast evaluation.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "ends/expr.hpp"

namespace ends {

/// Point on the cross-section; w0 is theta on S^1, (w0, w1) are (u, v) on T^2.
struct Omega {
  double w0 = 0.0;
  double w1 = 0.0;
};

struct WarpField {
  std::vector<std::string> coords;  // angular coordinate names, in order
  Expr value_expr, d_r_expr, d_rr_expr;
  std::vector<Expr> d_omega_expr;

  CompiledExpr value, d_r, d_rr;
  std::vector<CompiledExpr> d_omega;

  bool radial_only = true;
  std::array<double, 2> positivity_domain{0.0, 0.0};  // filled by validation

  double eval(Omega w, double r) const { return value.eval(r, w.w0, w.w1); }
  double eval_d_r(Omega w, double r) const { return d_r.eval(r, w.w0, w.w1); }
  double eval_d_rr(Omega w, double r) const { return d_rr.eval(r, w.w0, w.w1); }
  double eval_d_omega(int i, Omega w, double r) const {
    return d_omega[static_cast<std::size_t>(i)].eval(r, w.w0, w.w1);
  }

  double eval_fast(Omega w, double r) const noexcept {
    return value.eval_unchecked(r, w.w0, w.w1);
  }
  double eval_d_r_fast(Omega w, double r) const noexcept {
    return d_r.eval_unchecked(r, w.w0, w.w1);
  }
};

WarpField make_warp_field(const Expr& value, std::span<const std::string> coords);
WarpField make_warp_field(std::string_view text, std::span<const std::string> coords);

}  // namespace ends
