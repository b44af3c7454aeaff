#pragma once

// Tensor grids: periodic cross-section nodes times an ascending radial axis.
// Radial spacing follows min(1, phi(r)/phi(r_lo))^{1/2}, which is uniform for
// nondecreasing warps and densifies wherever the warp dips below its inner
// value.

#include <functional>
#include <vector>

#include "ends/cross_section.hpp"

namespace ends {

struct TensorGrid {
  CrossSection cross;
  int m0 = 1, m1 = 1;     // angular node counts (m1 == 1 on S^1)
  double h0 = 0.0, h1 = 0.0;
  std::vector<double> r;  // radial (or glued t-) nodes, ascending

  std::size_t radial_count() const { return r.size(); }
  std::size_t angular_count() const {
    return static_cast<std::size_t>(m0) * static_cast<std::size_t>(m1);
  }
  std::size_t node_count() const { return angular_count() * r.size(); }

  // Radial index varies fastest: each angular site owns a contiguous line.
  std::size_t index(int j0, int j1, std::size_t k) const {
    return (static_cast<std::size_t>(j1) * static_cast<std::size_t>(m0) +
            static_cast<std::size_t>(j0)) *
               r.size() +
           k;
  }
  Omega omega(int j0, int j1) const {
    return {h0 * j0, m1 > 1 ? h1 * j1 : 0.0};
  }
};

/// `count` nodes on [r_lo, r_hi] including both endpoints, spaced by the
/// grading weight evaluated on `profile` (a radial positive function).
std::vector<double> graded_radial_nodes(const std::function<double(double)>& profile,
                                        double r_lo, double r_hi, int count);

TensorGrid make_tensor_grid(const CrossSection& cross, int cross_nodes,
                            std::vector<double> radial_nodes);

}  // namespace ends
