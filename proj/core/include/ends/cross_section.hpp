#pragma once

// Supported cross-sections (flat S^1 and T^2) and the description of a
// warped-product end g = dr^2 + phi(omega, r)^2 g_N over them.

#include <stdexcept>
#include <string>
#include <vector>

#include "ends/warp.hpp"

namespace ends {

enum class CrossKind { Circle, FlatTorus };

struct CrossSection {
  CrossKind kind = CrossKind::Circle;
  double length_u = 0.0;  // circumference (fixed 2*pi for the circle)
  double length_v = 0.0;  // second side length, torus only

  static CrossSection circle();
  static CrossSection flat_torus(double lu, double lv);

  int dimension() const { return kind == CrossKind::Circle ? 1 : 2; }
  int manifold_dimension() const { return dimension() + 1; }
  std::vector<std::string> coord_names() const;
  double period(int i) const { return i == 0 ? length_u : length_v; }

  /// Smallest positive eigenvalue of -Laplace on the flat cross-section
  /// (Fourier mode (1,0)).
  double first_mode_eigenvalue() const;

  bool same_as(const CrossSection& other) const;
};

class EndSpecError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EndSpec {
  CrossSection cross_section;
  WarpField warp;
  double r_start = 0.0;
  double expansive_from = 0.0;
};

/// Build an end description and verify its standing hypotheses by sampling
/// roughly `sample_budget` nodes over the cross-section times
/// [r_start, r_start + validation_span]: phi > 0 everywhere sampled, and
/// phi_r > 0 at sampled radii >= expansive_from. A violation throws
/// EndSpecError naming the offending point.
EndSpec make_end_spec(CrossSection cs, const Expr& warp, double r_start,
                      double expansive_from, double validation_span = 100.0,
                      int sample_budget = 1000);
EndSpec make_end_spec(CrossSection cs, std::string_view warp_text, double r_start,
                      double expansive_from, double validation_span = 100.0,
                      int sample_budget = 1000);

}  // namespace ends
