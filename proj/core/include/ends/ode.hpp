#pragma once

// Adaptive Dormand-Prince 5(4) integration for small fixed-size systems.
// Steps are clamped so requested sample abscissae are hit exactly; no dense
// output interpolation is involved.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace ends {

class OdeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <std::size_t N>
struct OdeSample {
  double t;
  std::array<double, N> y;
};

/// Integrate y' = rhs(t, y) from t0 to t1 (t0 < t1), returning the state at
/// every requested sample point (ascending, within (t0, t1]). rhs has
/// signature void(double t, const std::array<double,N>& y,
/// std::array<double,N>& dy).
template <std::size_t N, typename Rhs>
std::vector<OdeSample<N>> integrate_dopri(Rhs&& rhs, double t0, double t1,
                                          std::array<double, N> y,
                                          std::span<const double> samples,
                                          double rel_tol = 1e-10,
                                          double abs_tol = 1e-12) {
  static_assert(N >= 1);
  if (!(t1 > t0)) throw OdeError("integration interval must be increasing");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] <= t0 || samples[i] > t1 + 1e-12 * std::abs(t1) ||
        (i > 0 && samples[i] <= samples[i - 1]))
      throw OdeError("sample points must be ascending within (t0, t1]");
  }

  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                   a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b*: coefficients of the embedded error estimate.
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  using State = std::array<double, N>;
  auto axpy = [](State& out, const State& base, double h,
                 std::initializer_list<std::pair<double, const State*>> terms) {
    for (std::size_t i = 0; i < N; ++i) {
      double acc = 0.0;
      for (const auto& [c, k] : terms) acc += c * (*k)[i];
      out[i] = base[i] + h * acc;
    }
  };

  std::vector<OdeSample<N>> out;
  out.reserve(samples.size());
  std::size_t next_sample = 0;

  State k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
  rhs(t0, y, k1);
  double t = t0;
  double h = (t1 - t0) / 100.0;
  const double h_min = (t1 - t0) * 1e-14;
  long rejected_in_a_row = 0;

  while (t < t1) {
    double target = t1;
    if (next_sample < samples.size())
      target = std::min(target, samples[next_sample]);
    if (t + h >= target) h = target - t;
    if (h <= 0.0) h = h_min;

    axpy(tmp, y, h, {{a21, &k1}});
    rhs(t + h / 5.0, tmp, k2);
    axpy(tmp, y, h, {{a31, &k1}, {a32, &k2}});
    rhs(t + 3.0 * h / 10.0, tmp, k3);
    axpy(tmp, y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
    rhs(t + 4.0 * h / 5.0, tmp, k4);
    axpy(tmp, y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    rhs(t + 8.0 * h / 9.0, tmp, k5);
    axpy(tmp, y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    rhs(t + h, tmp, k6);
    axpy(ynew, y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    rhs(t + h, ynew, k7);

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                            e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale =
          abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (e / scale) * (e / scale);
      finite = finite && std::isfinite(ynew[i]);
    }
    err = std::sqrt(err / static_cast<double>(N));

    if (finite && err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      rejected_in_a_row = 0;
      while (next_sample < samples.size() &&
             t >= samples[next_sample] - 1e-12 * std::max(1.0, std::abs(t))) {
        out.push_back({samples[next_sample], y});
        ++next_sample;
      }
    } else {
      if (++rejected_in_a_row > 60 || !std::isfinite(err))
        throw OdeError("step size underflow (possible blow-up) at t = " +
                       std::to_string(t));
    }
    double factor = finite && err > 0.0
                        ? 0.9 * std::pow(err, -0.2)
                        : (finite ? 5.0 : 0.2);
    h *= std::clamp(factor, 0.2, 5.0);
    if (h < h_min) h = h_min;
  }
  while (next_sample < samples.size()) {  // t1 reached within tolerance
    out.push_back({samples[next_sample], y});
    ++next_sample;
  }
  return out;
}

}  // namespace ends
