#pragma once

// Numerical checks for the solvability hypotheses: a dominating radial
// comparison warp with ordered log-derivatives and a convergent tail
// integral of 1/phi_bar, plus the Sturm comparison check.

#include <cstdint>
#include <functional>
#include <string>

#include "ends/cross_section.hpp"

namespace ends {

enum class TailVerdict { Convergent, Divergent, Inconclusive };

std::string_view to_string(TailVerdict v);

struct TailIntegral {
  TailVerdict verdict = TailVerdict::Inconclusive;
  double value = 0.0;        // full integral from r0, meaningful when Convergent
  double error_bound = 0.0;  // quadrature error estimate + truncated-tail bound
  double growth_exponent = 0.0;  // least-squares slope of log phi_bar vs log r
  std::string note;
};

struct ComparisonWarp {
  WarpField phi_bar;  // radial-only
  double r0 = 0.0;
  TailIntegral tail;
};

class CriteriaError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Decide convergence of int_{r0}^inf dr / phi_bar(r). The growth exponent p
/// is fitted over the last decade of radii (up to r_max) where phi_bar is
/// finite; p > 1.1 yields Convergent with a value, p <= 1 Divergent (the
/// integral of r^-p diverges for every such p), and the band (1, 1.1]
/// Inconclusive: the fit cannot tell r^{1+eps} from r log^q r. Non-finite or
/// non-positive samples give Inconclusive with a note.
TailIntegral tail_integral(const WarpField& phi_bar, double r0,
                           double r_max = 1e6, long budget = 200000);

/// int_r^inf ds / phi_bar(s), assuming a Convergent verdict. Splits at e and
/// substitutes s = exp(1/t) beyond it so slowly decaying tails (1/(r log^2 r))
/// are integrated exactly rather than truncated.
double tail_integral_from(const WarpField& phi_bar, double r, double* error = nullptr);

/// Validate phi_bar (radial, positive, increasing beyond r0 on samples) and
/// attach its tail integral.
ComparisonWarp make_comparison_warp(const Expr& phi_bar, double r0,
                                    double validation_span = 100.0,
                                    int samples = 1000);
ComparisonWarp make_comparison_warp(std::string_view text, double r0,
                                    double validation_span = 100.0,
                                    int samples = 1000);

struct SampleSpec {
  int cross_per_dim = 128;
  int radial = 256;
  double radial_span = 100.0;  // sampling window above max(r0, r_start)
  std::uint64_t seed = 0;      // jitter seed
};

enum class CriterionVerdict { Solvable, NotEstablished };

std::string_view to_string(CriterionVerdict v);

struct CriterionReport {
  bool domination_ok = false;      // phi_bar <= phi at all samples
  bool log_derivative_ok = false;  // 0 < phi_bar_r/phi_bar <= phi_r/phi
  TailIntegral integral;
  CriterionVerdict overall = CriterionVerdict::NotEstablished;
  std::string diagnostics;  // first violation / evaluation error, if any
};

CriterionReport check_criterion(const EndSpec& end, const ComparisonWarp& comparison,
                                const SampleSpec& samples = {});

/// key: value serialization consumed by the CLI.
std::string to_text(const CriterionReport& report);

struct SturmInput {
  double a = 0.0, b = 1.0;
  double u0 = 0.0, u0p = 0.0;  // u(a), u'(a)
  double v0 = 0.0, v0p = 0.0;
  std::function<double(double)> quotient_u;  // q(r) with u'' = q u
  std::function<double(double)> quotient_v;
};

struct SturmResult {
  bool part_a_applicable = false;  // u(a) <= v(a) and u'(a) <= v'(a)
  bool part_b_applicable = false;  // u'(a)/u(a) <= v'(a)/v(a), u,v > 0
  double violation_value = 0.0;     // max over samples of u - v, floored at 0
  double violation_log_deriv = 0.0; // max of u'/u - v'/v, floored at 0
  double max_violation = 0.0;       // max over the applicable parts
};

/// Integrate u'' = q_u u and v'' = q_v v as one system with adaptive
/// Dormand-Prince steps and check the comparison conclusions on [a, b].
/// Throws CriteriaError if the quotient ordering q_u <= q_v fails at a
/// checked sample, or if neither part's initial ordering holds.
SturmResult sturm_compare(const SturmInput& input, int samples = 512,
                          double rel_tol = 1e-12);

/// phi_bar = alpha sinh(a (r - r_start) + 1) with alpha = 0.9 * min of the
/// three bounds (evaluated at r = end.r_start over the sampled cross-section):
///   alpha sinh 1   < min phi,
///   alpha a        < min phi_r / phi,
///   alpha a cosh 1 < min phi_r.
/// Requires a > 0 and radial curvature <= -a^2 at sampled points.
ComparisonWarp hyperbolic_comparison_warp(const EndSpec& end, double a,
                                          double validation_span = 100.0,
                                          int cross_samples = 256,
                                          int radial_samples = 256);

}  // namespace ends
