#include "ends/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "ends/ode.hpp"

namespace ends {
namespace {

constexpr double kGlueTol = 1e-8;

std::string fmt(double v) {
  if (std::isnan(v)) return "-";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void reject_radial_dependence(const Expr& e, const char* what) {
  if (e.depends_on("r"))
    throw SolverError(std::string(what) +
                      " must be a function of the angular coordinates only");
}

CompiledExpr compile_data(const Expr& e, const CrossSection& cross) {
  const auto names = cross.coord_names();
  return CompiledExpr(e, names);
}

void widen_data_band(const CompiledExpr& f, const CrossSection& cross,
                     double& mn, double& mx) {
  if (cross.dimension() == 1) {
    const int m = 4096;
    const double h = cross.period(0) / m;
    for (int i = 0; i < m; ++i) {
      const double v = f.eval(0.0, h * i);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
  } else {
    const int m = 192;
    const double hu = cross.period(0) / m, hv = cross.period(1) / m;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double v = f.eval(0.0, hu * i, hv * j);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
  }
}

double data_band_min(const CompiledExpr& f, const CrossSection& cross) {
  double mn = std::numeric_limits<double>::infinity(), mx = -mn;
  widen_data_band(f, cross, mn, mx);
  return mn;
}

double data_band_max(const CompiledExpr& f, const CrossSection& cross) {
  double mn = std::numeric_limits<double>::infinity(), mx = -mn;
  widen_data_band(f, cross, mn, mx);
  return mx;
}

}  // namespace

ManifoldConfig make_single_end_config(EndSpec end, const Expr& inner_data,
                                      const Expr& data_at_infinity) {
  reject_radial_dependence(inner_data, "inner wall datum");
  reject_radial_dependence(data_at_infinity, "datum at infinity");
  ManifoldConfig c;
  c.topology = Topology::SingleEnd;
  c.end_plus = std::move(end);
  c.inner_data = inner_data;
  c.data_plus = data_at_infinity;
  c.inner_data_c = compile_data(inner_data, c.end_plus.cross_section);
  c.data_plus_c = compile_data(data_at_infinity, c.end_plus.cross_section);
  c.data_min = std::numeric_limits<double>::infinity();
  c.data_max = -c.data_min;
  widen_data_band(c.inner_data_c, c.end_plus.cross_section, c.data_min, c.data_max);
  widen_data_band(c.data_plus_c, c.end_plus.cross_section, c.data_min, c.data_max);
  return c;
}

ManifoldConfig make_two_ends_config(EndSpec plus, EndSpec minus,
                                    const Expr& data_plus, const Expr& data_minus) {
  if (!plus.cross_section.same_as(minus.cross_section))
    throw SolverError("glued ends must share the cross-section");
  if (plus.r_start != 0.0 || minus.r_start != 0.0)
    throw SolverError("glued ends must both start at r = 0");
  reject_radial_dependence(data_plus, "plus-end datum");
  reject_radial_dependence(data_minus, "minus-end datum");

  // C^1 gluing: equal warp values, opposite outward radial derivatives.
  const auto check = [&](Omega w) {
    const double vp = plus.warp.eval(w, 0.0);
    const double vm = minus.warp.eval(w, 0.0);
    const double dp = plus.warp.eval_d_r(w, 0.0);
    const double dm = minus.warp.eval_d_r(w, 0.0);
    if (std::abs(vp - vm) > kGlueTol * std::max(1.0, std::abs(vp))) {
      std::ostringstream os;
      os << "gluing is not C^0 at omega=(" << fmt(w.w0) << "," << fmt(w.w1)
         << "): phi+ = " << fmt(vp) << ", phi- = " << fmt(vm);
      throw SolverError(os.str());
    }
    if (std::abs(dp + dm) > kGlueTol * std::max(1.0, std::abs(dp))) {
      std::ostringstream os;
      os << "gluing is not C^1 at omega=(" << fmt(w.w0) << "," << fmt(w.w1)
         << "): phi_r+ = " << fmt(dp) << ", phi_r- = " << fmt(dm)
         << " (outward derivatives must be opposite)";
      throw SolverError(os.str());
    }
  };
  if (plus.cross_section.dimension() == 1) {
    const int m = 257;
    for (int i = 0; i < m; ++i)
      check({plus.cross_section.period(0) * i / m, 0.0});
  } else {
    const int m = 33;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        check({plus.cross_section.period(0) * i / m,
               plus.cross_section.period(1) * j / m});
  }

  ManifoldConfig c;
  c.topology = Topology::TwoEnds;
  c.end_plus = std::move(plus);
  c.end_minus = std::move(minus);
  c.data_plus = data_plus;
  c.data_minus = data_minus;
  c.data_plus_c = compile_data(data_plus, c.end_plus.cross_section);
  c.data_minus_c = compile_data(data_minus, c.end_plus.cross_section);
  c.data_min = std::numeric_limits<double>::infinity();
  c.data_max = -c.data_min;
  widen_data_band(c.data_plus_c, c.end_plus.cross_section, c.data_min, c.data_max);
  widen_data_band(c.data_minus_c, c.end_plus.cross_section, c.data_min, c.data_max);
  return c;
}

double glued_warp(const ManifoldConfig& config, const Omega& w, double t) {
  if (config.topology == Topology::SingleEnd || t >= 0.0)
    return config.end_plus.warp.eval(w, t);
  return config.end_minus->warp.eval(w, -t);
}

double glued_warp_d_t(const ManifoldConfig& config, const Omega& w, double t) {
  if (config.topology == Topology::SingleEnd || t >= 0.0)
    return config.end_plus.warp.eval_d_r(w, t);
  return -config.end_minus->warp.eval_d_r(w, -t);
}

DiscreteProblem assemble(const ManifoldConfig& config, double truncation_radius,
                         const GridSpec& spec) {
  const bool two = config.topology == Topology::TwoEnds;
  const EndSpec& ep = config.end_plus;
  const double r_lo = two ? -truncation_radius : ep.r_start;
  const double r_hi = truncation_radius;
  if (!(r_hi > r_lo))
    throw SolverError("truncation radius must exceed the inner radius");
  if (spec.radial_nodes < 3 || spec.cross_nodes < 4)
    throw SolverError("grid too small: need >= 3 radial and >= 4 angular nodes");

  std::vector<double> rnodes;
  if (spec.graded) {
    const auto profile = [&](double t) { return glued_warp(config, {0.0, 0.0}, t); };
    rnodes = graded_radial_nodes(profile, r_lo, r_hi, spec.radial_nodes);
  } else {
    rnodes.resize(static_cast<std::size_t>(spec.radial_nodes));
    for (int i = 0; i < spec.radial_nodes; ++i)
      rnodes[static_cast<std::size_t>(i)] =
          r_lo + (r_hi - r_lo) * (static_cast<double>(i) / (spec.radial_nodes - 1));
  }

  DiscreteProblem P;
  P.grid = make_tensor_grid(ep.cross_section, spec.cross_nodes, std::move(rnodes));
  const TensorGrid& g = P.grid;
  const std::size_t mr = g.radial_count();
  const std::size_t n_nodes = g.node_count();
  const int dimN = ep.cross_section.dimension();
  const int n = ep.cross_section.manifold_dimension();

  const bool radial_warp =
      ep.warp.radial_only && (!two || config.end_minus->warp.radial_only);

  // Per-radius warp cache for radial warps; otherwise evaluated per node.
  std::vector<double> phi_cache, dphi_cache;
  if (radial_warp) {
    phi_cache.resize(mr);
    dphi_cache.resize(mr);
    for (std::size_t k = 0; k < mr; ++k) {
      phi_cache[k] = glued_warp(config, {0.0, 0.0}, g.r[k]);
      dphi_cache[k] = glued_warp_d_t(config, {0.0, 0.0}, g.r[k]);
    }
  }

  P.matrix.resize(static_cast<Eigen::Index>(n_nodes), static_cast<Eigen::Index>(n_nodes));
  P.matrix.reserve(Eigen::VectorXi::Constant(static_cast<Eigen::Index>(n_nodes),
                                             1 + 2 + 2 * dimN));
  P.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_nodes));
  P.boundary.assign(n_nodes, 0);
  P.tri_sub.assign(n_nodes, 0.0);
  P.tri_diag.assign(n_nodes, 1.0);
  P.tri_sup.assign(n_nodes, 0.0);

  std::array<std::pair<std::size_t, double>, 7> entries{};

  for (int j1 = 0; j1 < g.m1; ++j1) {
    for (int j0 = 0; j0 < g.m0; ++j0) {
      const Omega w = g.omega(j0, j1);
      for (std::size_t k = 0; k < mr; ++k) {
        const std::size_t idx = g.index(j0, j1, k);
        const double rk = g.r[k];
        if (k == 0 || k + 1 == mr) {
          P.matrix.insert(static_cast<Eigen::Index>(idx),
                          static_cast<Eigen::Index>(idx)) = 1.0;
          P.boundary[idx] = 1;
          double value;
          if (k + 1 == mr) value = config.data_plus_c.eval(0.0, w.w0, w.w1);
          else if (two) value = config.data_minus_c.eval(0.0, w.w0, w.w1);
          else value = config.inner_data_c.eval(0.0, w.w0, w.w1);
          P.rhs[static_cast<Eigen::Index>(idx)] = value;
          continue;
        }

        const double h_m = g.r[k] - g.r[k - 1];
        const double h_p = g.r[k + 1] - g.r[k];
        const double s = h_m * h_p;  // row scale: keeps entries O(1)

        double phi, dphi;
        if (radial_warp) {
          phi = phi_cache[k];
          dphi = dphi_cache[k];
        } else {
          phi = glued_warp(config, w, rk);
          dphi = glued_warp_d_t(config, w, rk);
        }
        if (!(phi > 0.0))
          throw SolverError("warp must stay positive on the grid (r = " + fmt(rk) + ")");
        const double c_r = (n - 1) * dphi / phi;
        const double c_n = 1.0 / (phi * phi);

        // Angular drift (n-3)/phi^3 * grad phi: nonzero only for n == 2
        // with an angle-dependent warp; the factor vanishes at n == 3.
        double c_g0 = 0.0, c_g1 = 0.0;
        if (!radial_warp && n == 2) {
          const double dw0 = rk >= 0.0 || !two
                                 ? ep.warp.eval_d_omega(0, w, rk)
                                 : config.end_minus->warp.eval_d_omega(0, w, -rk);
          c_g0 = (n - 3) * dw0 / (phi * phi * phi);
        }

        const double hsum = h_m + h_p;
        const double a_rm = h_p * (2.0 - c_r * h_p) / hsum;
        const double a_rp = h_m * (2.0 + c_r * h_m) / hsum;
        if (a_rm < 0.0 || a_rp < 0.0) {
          P.stencil_sign_ok = false;
          if (P.stencil_note.empty()) {
            const double h_req = 2.0 / std::abs(c_r);
            const int need = static_cast<int>(std::ceil((r_hi - r_lo) / h_req)) + 1;
            std::ostringstream os;
            os << "radial stencil loses positivity at r = " << fmt(rk)
               << ": drift " << fmt(c_r) << " needs spacing <= " << fmt(h_req)
               << "; raise radial_nodes to >= " << need;
            P.stencil_note = os.str();
          }
        }
        P.max_radial_drift_ratio = std::max(
            P.max_radial_drift_ratio, 0.5 * std::abs(c_r) * std::max(h_m, h_p));

        int count = 0;
        entries[count++] = {idx - 1, a_rm};
        entries[count++] = {idx + 1, a_rp};

        const double sig0 = c_n * s / (g.h0 * g.h0);
        const double d0 = c_g0 * s / (2.0 * g.h0);
        if (std::abs(c_g0) * g.h0 > 2.0 * c_n && P.stencil_sign_ok) {
          P.stencil_sign_ok = false;
          std::ostringstream os;
          os << "angular stencil loses positivity at r = " << fmt(rk)
             << ": |c_grad| h = " << fmt(std::abs(c_g0) * g.h0)
             << " exceeds 2 c_n = " << fmt(2.0 * c_n)
             << "; raise cross_nodes to >= "
             << static_cast<int>(std::ceil(g.cross.period(0) * std::abs(c_g0) /
                                           (2.0 * c_n))) + 1;
          P.stencil_note = os.str();
        }
        if (c_n > 0.0)
          P.max_angular_drift_ratio =
              std::max(P.max_angular_drift_ratio,
                       std::abs(c_g0) * g.h0 / (2.0 * c_n));

        const int j0m = (j0 + g.m0 - 1) % g.m0;
        const int j0p = (j0 + 1) % g.m0;
        entries[count++] = {g.index(j0m, j1, k), sig0 - d0};
        entries[count++] = {g.index(j0p, j1, k), sig0 + d0};

        if (dimN == 2) {
          const double sig1 = c_n * s / (g.h1 * g.h1);
          const double d1 = c_g1 * s / (2.0 * g.h1);
          const int j1m = (j1 + g.m1 - 1) % g.m1;
          const int j1p = (j1 + 1) % g.m1;
          entries[count++] = {g.index(j0, j1m, k), sig1 - d1};
          entries[count++] = {g.index(j0, j1p, k), sig1 + d1};
        }

        double offdiag_sum = 0.0;
        for (int e = 0; e < count; ++e) offdiag_sum += entries[e].second;
        const double diag = -offdiag_sum;  // constants are exactly harmonic
        entries[count++] = {idx, diag};

        std::sort(entries.begin(), entries.begin() + count,
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (int e = 0; e < count; ++e)
          P.matrix.insert(static_cast<Eigen::Index>(idx),
                          static_cast<Eigen::Index>(entries[e].first)) =
              entries[e].second;

        P.tri_sub[idx] = a_rm;
        P.tri_diag[idx] = diag;
        P.tri_sup[idx] = a_rp;
      }
    }
  }
  P.matrix.makeCompressed();
  return P;
}

namespace {

/// Thomas factorization of the per-line radial tridiagonal system.
struct LinePreconditioner {
  std::size_t mr = 0;
  std::vector<double> inv_diag;  // 1 / (diag - sub * cp_prev)
  std::vector<double> cp;        // sup * inv_diag
  const std::vector<double>* sub = nullptr;

  void factor(const DiscreteProblem& P) {
    mr = P.grid.radial_count();
    const std::size_t n = P.tri_diag.size();
    sub = &P.tri_sub;
    inv_diag.resize(n);
    cp.resize(n);
    for (std::size_t line = 0; line * mr < n; ++line) {
      const std::size_t i0 = line * mr;
      double denom = P.tri_diag[i0];
      if (std::abs(denom) < 1e-300)
        throw SolverError("line preconditioner breakdown (zero pivot)");
      inv_diag[i0] = 1.0 / denom;
      cp[i0] = P.tri_sup[i0] * inv_diag[i0];
      for (std::size_t k = 1; k < mr; ++k) {
        const std::size_t i = i0 + k;
        denom = P.tri_diag[i] - P.tri_sub[i] * cp[i - 1];
        if (std::abs(denom) < 1e-300)
          throw SolverError("line preconditioner breakdown (zero pivot)");
        inv_diag[i] = 1.0 / denom;
        cp[i] = P.tri_sup[i] * inv_diag[i];
      }
    }
  }

  void apply(const Eigen::VectorXd& y, Eigen::VectorXd& z) const {
    const std::size_t n = inv_diag.size();
    for (std::size_t line = 0; line * mr < n; ++line) {
      const std::size_t i0 = line * mr;
      z[static_cast<Eigen::Index>(i0)] =
          y[static_cast<Eigen::Index>(i0)] * inv_diag[i0];
      for (std::size_t k = 1; k < mr; ++k) {
        const std::size_t i = i0 + k;
        z[static_cast<Eigen::Index>(i)] =
            (y[static_cast<Eigen::Index>(i)] -
             (*sub)[i] * z[static_cast<Eigen::Index>(i - 1)]) *
            inv_diag[i];
      }
      for (std::size_t k = mr - 1; k-- > 0;) {
        const std::size_t i = i0 + k;
        z[static_cast<Eigen::Index>(i)] -= cp[i] * z[static_cast<Eigen::Index>(i + 1)];
      }
    }
  }
};

}  // namespace

Eigen::VectorXd solve(const DiscreteProblem& problem, double tol,
                      int max_iterations, SolveStats* stats) {
  const auto& A = problem.matrix;
  const Eigen::Index n = A.rows();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = problem.rhs;
  const double bnorm = r.norm();
  SolveStats local;
  if (bnorm == 0.0) {
    local.converged = true;
    if (stats) *stats = local;
    return x;
  }

  LinePreconditioner M;
  M.factor(problem);

  Eigen::VectorXd rhat = r;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n), v = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd s(n), t(n), phat(n), shat(n), true_res(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  int it = 0, refreshes = 0;
  bool converged = false;

  const auto refresh = [&]() {
    true_res.noalias() = problem.rhs - A * x;
    r = true_res;
    rhat = r;
    rho = alpha = omega = 1.0;
    p.setZero();
    v.setZero();
    if (++refreshes > 6)
      throw SolverError("linear solve stalled after repeated restarts: residual " +
                        fmt(r.norm() / bnorm) + " at iteration " + fmt(it));
  };

  // Declared convergence is re-verified against the true residual.
  const auto verify = [&]() {
    true_res.noalias() = problem.rhs - A * x;
    const double rel = true_res.norm() / bnorm;
    if (rel <= tol) {
      local.relative_residual = rel;
      converged = true;
      return true;
    }
    refresh();
    return false;
  };

  while (it < max_iterations && !converged) {
    double rho_new = rhat.dot(r);
    if (std::abs(rho_new) < 1e-300) {
      rhat = r;
      rho_new = r.squaredNorm();
      if (rho_new == 0.0) {
        if (verify()) break;
        continue;
      }
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    p = r + beta * (p - omega * v);
    M.apply(p, phat);
    v.noalias() = A * phat;
    const double denom = rhat.dot(v);
    if (std::abs(denom) < 1e-300) {
      refresh();
      ++it;
      continue;
    }
    alpha = rho_new / denom;
    s = r - alpha * v;
    ++it;
    if (s.norm() <= tol * bnorm) {
      x += alpha * phat;
      if (verify()) break;
      continue;
    }
    M.apply(s, shat);
    t.noalias() = A * shat;
    const double tt = t.squaredNorm();
    if (tt == 0.0) {
      x += alpha * phat;
      refresh();
      continue;
    }
    omega = t.dot(s) / tt;
    x += alpha * phat + omega * shat;
    r = s - omega * t;
    rho = rho_new;
    if (r.norm() <= tol * bnorm) {
      if (verify()) break;
      continue;
    }
    if (omega == 0.0) refresh();
  }

  local.iterations = it;
  if (!converged) {
    true_res.noalias() = problem.rhs - A * x;
    const double rel = true_res.norm() / bnorm;
    if (stats) {
      stats->iterations = it;
      stats->relative_residual = rel;
      stats->converged = false;
    }
    throw SolverError("linear solve did not converge: relative residual " +
                      fmt(rel) + " after " + fmt(it) + " iterations (tol " +
                      fmt(tol) + ")");
  }
  local.converged = true;
  if (stats) *stats = local;
  return x;
}

double probe_value(const TensorGrid& grid, const Eigen::VectorXd& u,
                   const ProbePoint& p) {
  const auto snap = [](double w, double h, int m) {
    if (m <= 1) return 0;
    const long j = std::lround(w / h);
    return static_cast<int>(((j % m) + m) % m);
  };
  const int j0 = snap(p.omega.w0, grid.h0, grid.m0);
  const int j1 = snap(p.omega.w1, grid.h1, grid.m1);
  const auto& r = grid.r;
  double rr = std::clamp(p.r, r.front(), r.back());
  auto it = std::upper_bound(r.begin(), r.end(), rr);
  std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - r.begin() - 1, 0));
  if (k + 1 >= r.size()) k = r.size() - 2;
  const double t = (rr - r[k]) / (r[k + 1] - r[k]);
  const double a = u[static_cast<Eigen::Index>(grid.index(j0, j1, k))];
  const double b = u[static_cast<Eigen::Index>(grid.index(j0, j1, k + 1))];
  return (1.0 - t) * a + t * b;
}

const char* to_string(ExhaustVerdict v) {
  return v == ExhaustVerdict::Converged ? "Converged" : "NotConverged";
}

ExhaustResult exhaust(const ManifoldConfig& config,
                      const std::vector<double>& schedule,
                      const std::vector<ProbePoint>& probes,
                      double tol_exhaustion, const GridSpec& spec) {
  if (schedule.empty()) throw SolverError("exhaustion schedule is empty");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (!(schedule[i] > schedule[i - 1]))
      throw SolverError("exhaustion schedule must be strictly increasing");
  if (probes.empty()) throw SolverError("exhaustion needs at least one probe");
  const bool two = config.topology == Topology::TwoEnds;
  const double r_lo0 = two ? -schedule.front() : config.end_plus.r_start;
  for (const auto& p : probes) {
    if (!(p.r < schedule.front()) || !(p.r >= r_lo0))
      throw SolverError("probe at r = " + fmt(p.r) +
                        " lies outside the first truncation");
  }
  if (!(tol_exhaustion > 0.0)) throw SolverError("tol_exhaustion must be positive");

  const double len0 = schedule.front() - r_lo0;
  ExhaustResult out;
  out.data_min = config.data_min;
  out.data_max = config.data_max;
  const double band_tol = 1e-9 * (1.0 + std::max(std::abs(config.data_min),
                                                 std::abs(config.data_max)));

  std::vector<double> prev_values;
  for (std::size_t step = 0; step < schedule.size(); ++step) {
    const double R = schedule[step];
    const double r_lo = two ? -R : config.end_plus.r_start;
    GridSpec local = spec;
    // Constant radial spacing across the schedule: node count grows with R.
    local.radial_nodes = 1 + static_cast<int>(std::lround(
                                 (R - r_lo) / len0 * (spec.radial_nodes - 1)));
    DiscreteProblem P = assemble(config, R, local);
    SolveStats stats;
    Eigen::VectorXd u = solve(P, 1e-10, 20000, &stats);

    std::vector<double> values(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i)
      values[i] = probe_value(P.grid, u, probes[i]);
    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());

    ExhaustTraceEntry entry;
    entry.truncation_radius = R;
    entry.probe_oscillation = *mx_it - *mn_it;
    entry.sup_change = std::numeric_limits<double>::quiet_NaN();
    if (step > 0) {
      double change = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i)
        change = std::max(change, std::abs(values[i] - prev_values[i]));
      entry.sup_change = change;
    }
    out.trace.push_back(entry);
    prev_values = values;

    const double u_min = u.minCoeff(), u_max = u.maxCoeff();
    if (u_min < config.data_min - band_tol || u_max > config.data_max + band_tol)
      out.max_principle_ok = false;

    if (step + 1 == schedule.size()) {
      out.probe_values = std::move(values);
      out.grid = std::move(P.grid);
      out.u = std::move(u);
      out.stats = stats;
      out.solution_min = u_min;
      out.solution_max = u_max;
    }
  }

  const std::size_t m = out.trace.size();
  if (m >= 3 && out.trace[m - 1].sup_change < tol_exhaustion &&
      out.trace[m - 2].sup_change < tol_exhaustion)
    out.verdict = ExhaustVerdict::Converged;
  return out;
}

std::string to_text(const ExhaustResult& result) {
  std::ostringstream os;
  os << "verdict: " << to_string(result.verdict) << "\n";
  os << "steps: " << result.trace.size() << "\n";
  if (!result.trace.empty()) {
    os << "final_truncation: " << fmt(result.trace.back().truncation_radius) << "\n";
    os << "final_probe_oscillation: " << fmt(result.trace.back().probe_oscillation)
       << "\n";
    os << "final_sup_change: " << fmt(result.trace.back().sup_change) << "\n";
  }
  os << "solution_min: " << fmt(result.solution_min) << "\n";
  os << "solution_max: " << fmt(result.solution_max) << "\n";
  os << "data_min: " << fmt(result.data_min) << "\n";
  os << "data_max: " << fmt(result.data_max) << "\n";
  os << "max_principle_ok: " << (result.max_principle_ok ? "true" : "false") << "\n";
  os << "final_iterations: " << result.stats.iterations << "\n";
  os << "final_relative_residual: " << fmt(result.stats.relative_residual) << "\n";
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const auto& e = result.trace[i];
    os << "trace_" << (i + 1) << ": R=" << fmt(e.truncation_radius)
       << " oscillation=" << fmt(e.probe_oscillation)
       << " sup_change=" << fmt(e.sup_change) << "\n";
  }
  return os.str();
}

namespace {

std::vector<double> mode_shot(const std::function<void(double, const std::array<double, 2>&,
                                                       std::array<double, 2>&)>& rhs,
                              double t0, double R,
                              const std::vector<double>& points) {
  if (points.empty()) return {};
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i] > t0) || !(points[i] <= R) ||
        (i > 0 && points[i] <= points[i - 1]))
      throw SolverError("oracle sample radii must be ascending within (start, R]");
  }
  std::vector<double> samples = points;
  if (samples.back() < R) samples.push_back(R);
  const auto states = integrate_dopri<2>(rhs, t0, R, {0.0, 1.0}, samples, 1e-12, 1e-14);
  const double yR = states.back().y[0];
  if (!(std::abs(yR) > 1e-300))
    throw SolverError("radial mode oracle degenerate: mode vanishes at the wall");
  std::vector<double> h(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) h[i] = states[i].y[0] / yR;
  return h;
}

}  // namespace

std::vector<double> radial_mode_oracle(const EndSpec& end, double nu2, double R,
                                       const std::vector<double>& r_points) {
  if (!end.warp.radial_only)
    throw SolverError("radial mode oracle requires a radial warp");
  if (!(R > end.r_start)) throw SolverError("oracle wall must exceed r_start");
  const int n = end.cross_section.manifold_dimension();
  const auto rhs = [&](double r, const std::array<double, 2>& y,
                       std::array<double, 2>& dy) {
    const double phi = end.warp.eval_fast({0.0, 0.0}, r);
    const double dphi = end.warp.eval_d_r_fast({0.0, 0.0}, r);
    dy[0] = y[1];
    dy[1] = -(n - 1) * (dphi / phi) * y[1] + (nu2 / (phi * phi)) * y[0];
  };
  return mode_shot(rhs, end.r_start, R, r_points);
}

std::vector<double> radial_mode_oracle(const ManifoldConfig& config, double nu2,
                                       double R, const std::vector<double>& t_points) {
  if (config.topology != Topology::TwoEnds)
    throw SolverError("glued mode oracle requires a two-end manifold");
  if (!config.end_plus.warp.radial_only || !config.end_minus->warp.radial_only)
    throw SolverError("radial mode oracle requires radial warps");
  const int n = config.end_plus.cross_section.manifold_dimension();
  const auto rhs = [&](double t, const std::array<double, 2>& y,
                       std::array<double, 2>& dy) {
    const double phi = glued_warp(config, {0.0, 0.0}, t);
    const double dphi = glued_warp_d_t(config, {0.0, 0.0}, t);
    dy[0] = y[1];
    dy[1] = -(n - 1) * (dphi / phi) * y[1] + (nu2 / (phi * phi)) * y[0];
  };
  return mode_shot(rhs, -R, R, t_points);
}

LiouvilleResult liouville_witness(const ManifoldConfig& config,
                                  const std::vector<double>& schedule,
                                  const std::vector<ProbePoint>& probes,
                                  double tol_exhaustion, const GridSpec& spec) {
  if (config.topology != Topology::TwoEnds)
    throw SolverError("liouville witness requires a two-end manifold");
  LiouvilleResult out;
  out.f_min = data_band_min(config.data_plus_c, config.end_plus.cross_section);
  out.f_max = data_band_max(config.data_plus_c, config.end_plus.cross_section);

  // Pin the far end at the minimum of the distinguished datum; any probe
  // separation in the limit then witnesses a bounded nonconstant harmonic
  // function.
  ManifoldConfig pinned = config;
  pinned.data_minus = make_number(out.f_min);
  pinned.data_minus_c = compile_data(pinned.data_minus, pinned.end_plus.cross_section);
  pinned.data_min = out.f_min;
  pinned.data_max = out.f_max;

  out.exhaust = exhaust(pinned, schedule, probes, tol_exhaustion, spec);
  if (!out.exhaust.probe_values.empty()) {
    const auto [mn, mx] = std::minmax_element(out.exhaust.probe_values.begin(),
                                              out.exhaust.probe_values.end());
    out.separation = *mx - *mn;
  }
  return out;
}

}  // namespace ends
