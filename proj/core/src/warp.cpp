#include "ends/warp.hpp"

namespace ends {

WarpField make_warp_field(const Expr& value, std::span<const std::string> coords) {
  WarpField f;
  f.coords.assign(coords.begin(), coords.end());
  f.value_expr = value;
  f.d_r_expr = differentiate(value, "r");
  f.d_rr_expr = differentiate(f.d_r_expr, "r");
  f.value = CompiledExpr(f.value_expr, coords);
  f.d_r = CompiledExpr(f.d_r_expr, coords);
  f.d_rr = CompiledExpr(f.d_rr_expr, coords);
  f.radial_only = true;
  for (const auto& c : coords) {
    f.d_omega_expr.push_back(differentiate(value, c));
    f.d_omega.emplace_back(f.d_omega_expr.back(), coords);
    if (value.depends_on(c)) f.radial_only = false;
  }
  return f;
}

WarpField make_warp_field(std::string_view text, std::span<const std::string> coords) {
  return make_warp_field(parse_expr(text, coords), coords);
}

}  // namespace ends
