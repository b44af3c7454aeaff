#include "ends/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ends {

std::vector<double> graded_radial_nodes(const std::function<double(double)>& profile,
                                        double r_lo, double r_hi, int count) {
  if (!(r_hi > r_lo)) throw std::invalid_argument("graded_radial_nodes: empty interval");
  if (count < 2) throw std::invalid_argument("graded_radial_nodes: need at least 2 nodes");

  const double base = profile(r_lo);
  // Density 1/w with w = min(1, profile/base)^{1/2}; arclength in the graded
  // coordinate accumulated on a fine uniform mesh, then inverted.
  constexpr int kFine = 8192;
  const double dr = (r_hi - r_lo) / kFine;
  std::vector<double> arc(kFine + 1, 0.0);
  bool uniform = true;
  auto density = [&](double rr) {
    const double ratio = profile(rr) / base;
    const double w = std::sqrt(std::min(1.0, std::max(ratio, 1e-12)));
    return 1.0 / w;
  };
  double prev = density(r_lo);
  if (std::abs(prev - 1.0) > 1e-12) uniform = false;
  for (int i = 1; i <= kFine; ++i) {
    const double cur = density(r_lo + dr * i);
    if (std::abs(cur - 1.0) > 1e-12) uniform = false;
    arc[i] = arc[i - 1] + 0.5 * (prev + cur) * dr;
    prev = cur;
  }

  std::vector<double> nodes(count);
  nodes.front() = r_lo;
  nodes.back() = r_hi;
  if (uniform) {
    // Exact uniform spacing: avoids interpolation noise for monotone warps.
    for (int i = 1; i + 1 < count; ++i)
      nodes[i] = r_lo + (r_hi - r_lo) * (static_cast<double>(i) / (count - 1));
    return nodes;
  }
  const double total = arc.back();
  for (int i = 1; i + 1 < count; ++i) {
    const double target = total * (static_cast<double>(i) / (count - 1));
    const auto it = std::lower_bound(arc.begin(), arc.end(), target);
    const std::size_t hi = std::min<std::size_t>(it - arc.begin(), kFine);
    const std::size_t lo = hi - 1;
    const double frac = (target - arc[lo]) / std::max(arc[hi] - arc[lo], 1e-300);
    nodes[i] = r_lo + dr * (static_cast<double>(lo) + frac);
  }
  return nodes;
}

TensorGrid make_tensor_grid(const CrossSection& cross, int cross_nodes,
                            std::vector<double> radial_nodes) {
  if (cross_nodes < 4) throw std::invalid_argument("make_tensor_grid: need at least 4 angular nodes");
  if (radial_nodes.size() < 3) throw std::invalid_argument("make_tensor_grid: need at least 3 radial nodes");
  TensorGrid g;
  g.cross = cross;
  g.m0 = cross_nodes;
  g.h0 = cross.period(0) / cross_nodes;
  if (cross.dimension() == 2) {
    g.m1 = cross_nodes;
    g.h1 = cross.period(1) / cross_nodes;
  }
  g.r = std::move(radial_nodes);
  return g;
}

}  // namespace ends
