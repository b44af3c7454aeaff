#include "ends/cross_section.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace ends {

CrossSection CrossSection::circle() {
  CrossSection cs;
  cs.kind = CrossKind::Circle;
  cs.length_u = 2.0 * std::numbers::pi;
  cs.length_v = 0.0;
  return cs;
}

CrossSection CrossSection::flat_torus(double lu, double lv) {
  if (!(lu > 0.0) || !(lv > 0.0))
    throw EndSpecError("torus side lengths must be positive");
  CrossSection cs;
  cs.kind = CrossKind::FlatTorus;
  cs.length_u = lu;
  cs.length_v = lv;
  return cs;
}

std::vector<std::string> CrossSection::coord_names() const {
  if (kind == CrossKind::Circle) return {"theta"};
  return {"u", "v"};
}

double CrossSection::first_mode_eigenvalue() const {
  const double two_pi = 2.0 * std::numbers::pi;
  if (kind == CrossKind::Circle) return 1.0;
  const double ku = two_pi / length_u;
  const double kv = two_pi / length_v;
  const double k = std::min(ku, kv);
  return k * k;
}

bool CrossSection::same_as(const CrossSection& other) const {
  return kind == other.kind && length_u == other.length_u &&
         length_v == other.length_v;
}

namespace {

[[noreturn]] void report_violation(const char* what, const CrossSection& cs,
                                   Omega w, double r, double value) {
  std::ostringstream msg;
  msg << what << " violated at (";
  if (cs.kind == CrossKind::Circle)
    msg << "theta=" << w.w0;
  else
    msg << "u=" << w.w0 << ", v=" << w.w1;
  msg << ", r=" << r << "): value " << value;
  throw EndSpecError(msg.str());
}

}  // namespace

EndSpec make_end_spec(CrossSection cs, const Expr& warp, double r_start,
                      double expansive_from, double validation_span,
                      int sample_budget) {
  if (r_start < 0.0) throw EndSpecError("r_start must be >= 0");
  if (expansive_from < r_start)
    throw EndSpecError("expansive_from must be >= r_start");
  const auto coords = cs.coord_names();
  EndSpec end;
  end.cross_section = cs;
  end.warp = make_warp_field(warp, coords);
  end.r_start = r_start;
  end.expansive_from = expansive_from;

  // Distribute the sample budget over the angular dims and the radius.
  const int dim = cs.dimension();
  const int per_axis =
      std::max(2, static_cast<int>(std::round(
                      std::pow(static_cast<double>(sample_budget),
                               1.0 / static_cast<double>(dim + 1)))));
  const int m_r = std::max(
      2, sample_budget / static_cast<int>(std::pow(per_axis, dim)));
  const double r_hi = std::max(expansive_from, r_start) + validation_span;

  for (int k = 0; k < m_r; ++k) {
    const double r =
        r_start + (r_hi - r_start) * static_cast<double>(k) /
                      static_cast<double>(m_r - 1);
    for (int j0 = 0; j0 < per_axis; ++j0) {
      Omega w;
      w.w0 = cs.period(0) * static_cast<double>(j0) / per_axis;
      const int m1 = dim == 2 ? per_axis : 1;
      for (int j1 = 0; j1 < m1; ++j1) {
        if (dim == 2)
          w.w1 = cs.period(1) * static_cast<double>(j1) / per_axis;
        const double phi = end.warp.eval(w, r);
        if (!(phi > 0.0)) report_violation("warp positivity", cs, w, r, phi);
        if (r >= expansive_from) {
          const double phi_r = end.warp.eval_d_r(w, r);
          if (!(phi_r > 0.0))
            report_violation("expansiveness (phi_r > 0)", cs, w, r, phi_r);
        }
      }
    }
  }
  end.warp.positivity_domain = {r_start, r_hi};
  return end;
}

EndSpec make_end_spec(CrossSection cs, std::string_view warp_text, double r_start,
                      double expansive_from, double validation_span,
                      int sample_budget) {
  const auto coords = cs.coord_names();
  return make_end_spec(cs, parse_expr(warp_text, coords), r_start,
                       expansive_from, validation_span, sample_budget);
}

}  // namespace ends
