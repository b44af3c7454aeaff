#pragma once

// Finite-difference Dirichlet solves on truncated warped ends, the exhaustion
// loop over growing truncation radii, and ODE oracles for separable modes.
//
// Discretisation: second-order central stencils on a tensor grid, radial index
// fastest.  Rows are scaled by the local radial spacing product so entries stay
// O(1); the diagonal is the negated off-diagonal sum, making constants exactly
// harmonic.  The linear systems are solved by right-preconditioned BiCGSTAB
// with a radial line (Thomas) preconditioner; everything is sequential and
// deterministic.

#include <Eigen/Sparse>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ends/cross_section.hpp"
#include "ends/expr.hpp"
#include "ends/grid.hpp"

namespace ends {

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

enum class Topology { SingleEnd, TwoEnds };

/// A complete manifold: either one end capped by an inner Dirichlet wall, or
/// two ends glued C^1 along their shared cross-section at r = 0.
struct ManifoldConfig {
  Topology topology = Topology::SingleEnd;
  EndSpec end_plus;
  std::optional<EndSpec> end_minus;  // TwoEnds only

  Expr data_plus;    // boundary datum on the plus end, function of omega
  Expr data_minus;   // TwoEnds: datum on the minus end
  Expr inner_data;   // SingleEnd: datum on the inner wall r = r_start

  CompiledExpr data_plus_c, data_minus_c, inner_data_c;

  // Extremes of all imposed Dirichlet data, sampled; the discrete maximum
  // principle confines solutions to this band.
  double data_min = 0.0, data_max = 0.0;

  int dimension() const { return end_plus.cross_section.manifold_dimension(); }
};

ManifoldConfig make_single_end_config(EndSpec end, const Expr& inner_data,
                                      const Expr& data_at_infinity);

/// pre: both ends share the cross-section and have r_start == 0; the glued
/// warp must match in value and have opposite outward derivatives at r = 0
/// within 1e-8 (sampled over the cross-section).
ManifoldConfig make_two_ends_config(EndSpec plus, EndSpec minus,
                                    const Expr& data_plus, const Expr& data_minus);

/// Warp of the glued manifold as a function of the axial coordinate t
/// (t >= 0 on the plus end, t < 0 mirrored on the minus end).
double glued_warp(const ManifoldConfig& config, const Omega& w, double t);
double glued_warp_d_t(const ManifoldConfig& config, const Omega& w, double t);

struct GridSpec {
  int cross_nodes = 64;    // per angular dimension
  int radial_nodes = 129;  // node count (cells + 1) at the first truncation
  bool graded = true;      // apply the warp-based radial grading
};

struct DiscreteProblem {
  TensorGrid grid;
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  Eigen::VectorXd rhs;
  std::vector<std::uint8_t> boundary;  // 1 on Dirichlet rows
  // Radial tridiagonal part per line, used by the preconditioner.
  std::vector<double> tri_sub, tri_diag, tri_sup;
  // Assembly-time maximum-principle audit of the stencil signs.
  bool stencil_sign_ok = true;
  std::string stencil_note;
  double max_radial_drift_ratio = 0.0;   // max |c_r| h / 2 over interior nodes
  double max_angular_drift_ratio = 0.0;  // max |c_grad| h / (2 c_n)
};

DiscreteProblem assemble(const ManifoldConfig& config, double truncation_radius,
                         const GridSpec& spec);

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Right-preconditioned BiCGSTAB; throws SolverError when the relative
/// residual fails to reach `tol` within `max_iterations`.
Eigen::VectorXd solve(const DiscreteProblem& problem, double tol = 1e-10,
                      int max_iterations = 20000, SolveStats* stats = nullptr);

struct ProbePoint {
  Omega omega;
  double r = 0.0;
};

/// Value of the discrete solution at a probe: angular coordinates snap to the
/// nearest node, the radial coordinate interpolates linearly.
double probe_value(const TensorGrid& grid, const Eigen::VectorXd& u,
                   const ProbePoint& p);

struct ExhaustTraceEntry {
  double truncation_radius = 0.0;
  double probe_oscillation = 0.0;
  double sup_change = 0.0;  // NaN on the first entry
};

enum class ExhaustVerdict { Converged, NotConverged };
const char* to_string(ExhaustVerdict v);

struct ExhaustResult {
  ExhaustVerdict verdict = ExhaustVerdict::NotConverged;
  std::vector<ExhaustTraceEntry> trace;
  std::vector<double> probe_values;  // at the final truncation
  TensorGrid grid;                   // final grid
  Eigen::VectorXd u;                 // final solution
  SolveStats stats;                  // final solve
  double data_min = 0.0, data_max = 0.0;
  double solution_min = 0.0, solution_max = 0.0;
  bool max_principle_ok = true;
};

/// Solves on every truncation radius of `schedule` (ascending), keeping the
/// radial spacing of the first solve, and declares convergence once the probe
/// sup-change stays below `tol_exhaustion` for two consecutive steps.
/// pre: every probe radius lies inside the first truncation.
ExhaustResult exhaust(const ManifoldConfig& config,
                      const std::vector<double>& schedule,
                      const std::vector<ProbePoint>& probes,
                      double tol_exhaustion, const GridSpec& spec);

std::string to_text(const ExhaustResult& result);

/// Normalised radial profile h(r) of the separable mode with angular
/// eigenvalue nu2: h'' + (n-1)(phi_r/phi) h' - (nu2/phi^2) h = 0 with
/// h(r_start) = 0 and h(R) = 1, integrated by an adaptive Runge-Kutta shot.
/// Returns h at each requested radius (all in (r_start, R]).
std::vector<double> radial_mode_oracle(const EndSpec& end, double nu2, double R,
                                       const std::vector<double>& r_points);

/// Same oracle on a glued two-end manifold: h(-R) = 0, h(R) = 1 along t.
std::vector<double> radial_mode_oracle(const ManifoldConfig& config, double nu2,
                                       double R, const std::vector<double>& t_points);

struct LiouvilleResult {
  ExhaustResult exhaust;
  double f_min = 0.0, f_max = 0.0;    // extremes of the distinguished datum
  double separation = 0.0;            // oscillation of the final probe values
};

/// Witness construction against a Liouville property: keeps the datum on the
/// plus end and replaces the minus-end datum by the constant min f, then
/// exhausts.  A positive separation at interior probes certifies a bounded
/// nonconstant harmonic limit.
/// pre: config.topology == TwoEnds.
LiouvilleResult liouville_witness(const ManifoldConfig& config,
                                  const std::vector<double>& schedule,
                                  const std::vector<ProbePoint>& probes,
                                  double tol_exhaustion, const GridSpec& spec);

}  // namespace ends
