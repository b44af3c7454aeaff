#include "ends/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

#include "ends/barriers.hpp"
#include "ends/geometry.hpp"
#include "ends/io.hpp"

namespace ends {
namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "-";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CrossSection build_cross(const ExperimentConfig& cfg) {
  if (cfg.cross_kind == "torus")
    return CrossSection::flat_torus(cfg.torus_lu, cfg.torus_lv);
  return CrossSection::circle();
}

Expr parse_data(const ExperimentConfig& cfg, const std::string& text,
                const CrossSection& cross) {
  const auto names = cross.coord_names();
  try {
    return parse_expr(text, names);
  } catch (const ParseError& e) {
    throw ConfigError(cfg.path + ": in '" + text + "': " + e.what());
  }
}

GridSpec grid_spec(const ExperimentConfig& cfg, const RunOptions& opt) {
  GridSpec gs;
  gs.cross_nodes = cfg.cross_nodes;
  gs.radial_nodes = cfg.radial_nodes;
  gs.graded = cfg.graded;
  if (opt.resolution > 0) {
    gs.cross_nodes = opt.resolution;
    gs.radial_nodes = std::max(
        3, 1 + (cfg.radial_nodes - 1) * opt.resolution / std::max(cfg.cross_nodes, 1));
  }
  return gs;
}

void write_artifact(RunOutcome& out, const RunOptions& opt,
                    const std::string& name, const std::string& content) {
  if (opt.out_dir.empty()) return;
  std::filesystem::create_directories(opt.out_dir);
  const std::string path = (std::filesystem::path(opt.out_dir) / name).string();
  write_text_file(path, content);
  out.artifacts.push_back(path);
}

bool is_command_name(const std::string& s) {
  static const char* names[] = {"curvature", "criterion", "barrier-audit",
                                "solve",     "exhaust",   "liouville"};
  return std::find_if(std::begin(names), std::end(names), [&](const char* n) {
           return s == n;
         }) != std::end(names);
}

void finalize(RunOutcome& out, const ExperimentConfig& cfg, const RunOptions& opt,
              const char* command) {
  std::string head;
  head += std::string("command: ") + command + "\n";
  head += "config: " + cfg.path + "\n";
  out.report = head + out.report;

  // `command.key` rules apply only to that subcommand; bare keys always.
  std::vector<ExpectRule> applicable;
  for (const auto& rule : cfg.expects) {
    const std::size_t dot = rule.key.find('.');
    if (dot != std::string::npos && is_command_name(rule.key.substr(0, dot))) {
      if (rule.key.substr(0, dot) != command) continue;
      ExpectRule scoped = rule;
      scoped.key = rule.key.substr(dot + 1);
      applicable.push_back(std::move(scoped));
      continue;
    }
    applicable.push_back(rule);
  }
  out.expects = evaluate_expects(applicable, out.report);
  out.expects_ok = std::all_of(out.expects.begin(), out.expects.end(),
                               [](const ExpectOutcome& e) { return e.ok; });
  if (opt.strict && applicable.empty()) out.expects_ok = false;
  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    const std::string path =
        (std::filesystem::path(opt.out_dir) / "report.txt").string();
    write_text_file(path, out.report);
    out.artifacts.push_back(path);
  }
}

double max_probe_radius(const std::vector<ProbePoint>& probes) {
  double r = 0.0;
  for (const auto& p : probes) r = std::max(r, p.r);
  return r;
}

std::string probes_block(const std::vector<ProbePoint>& probes,
                         const std::vector<double>& values) {
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << "probe_" << (i + 1) << ": omega=(" << fmt(probes[i].omega.w0) << ","
       << fmt(probes[i].omega.w1) << ") r=" << fmt(probes[i].r)
       << " u=" << fmt(values[i]) << "\n";
    os << "probe_" << (i + 1) << "_value: " << fmt(values[i]) << "\n";
  }
  return os.str();
}

}  // namespace

EndSpec build_end(const ExperimentConfig& cfg) {
  const CrossSection cross = build_cross(cfg);
  try {
    return make_end_spec(cross, cfg.warp, cfg.r_start, cfg.expansive_from,
                         cfg.validation_span);
  } catch (const ParseError& e) {
    throw ConfigError(cfg.path + ": in warp '" + cfg.warp + "': " + e.what());
  }
}

EndSpec build_end_minus(const ExperimentConfig& cfg) {
  const CrossSection cross = build_cross(cfg);
  try {
    return make_end_spec(cross, cfg.warp_minus, 0.0, cfg.expansive_from_minus,
                         cfg.validation_span);
  } catch (const ParseError& e) {
    throw ConfigError(cfg.path + ": in warp_minus '" + cfg.warp_minus +
                      "': " + e.what());
  }
}

ManifoldConfig build_manifold(const ExperimentConfig& cfg) {
  const CrossSection cross = build_cross(cfg);
  if (cfg.topology == Topology::TwoEnds) {
    return make_two_ends_config(build_end(cfg), build_end_minus(cfg),
                                parse_data(cfg, cfg.data, cross),
                                parse_data(cfg, cfg.data_minus, cross));
  }
  return make_single_end_config(build_end(cfg),
                                parse_data(cfg, cfg.inner_data, cross),
                                parse_data(cfg, cfg.data, cross));
}

ComparisonWarp build_comparison(const ExperimentConfig& cfg, const EndSpec& end) {
  if (!cfg.comparison_warp.empty()) {
    const double r0 = cfg.comparison_r0 >= 0.0 ? cfg.comparison_r0 : end.r_start;
    try {
      return make_comparison_warp(cfg.comparison_warp, r0, cfg.validation_span);
    } catch (const ParseError& e) {
      throw ConfigError(cfg.path + ": in comparison warp '" + cfg.comparison_warp +
                        "': " + e.what());
    }
  }
  if (cfg.hyperbolic_a > 0.0)
    return hyperbolic_comparison_warp(end, cfg.hyperbolic_a, cfg.validation_span);
  throw ConfigError(cfg.path +
                    ": need [comparison] warp or hyperbolic_a for this command");
}

RunOutcome run_curvature(const ExperimentConfig& cfg, const RunOptions& opt) {
  const EndSpec end = build_end(cfg);
  const int samples = opt.resolution > 0 ? opt.resolution : 65;
  // Keep away from a vanishing warp at the very start of the end.
  double r_min = end.r_start;
  const Omega w0{0.0, 0.0};
  if (end.warp.eval(w0, r_min) <= 0.0) r_min += 1e-6;
  const double r_max = r_min + std::min(cfg.validation_span, 30.0);
  const auto profile = curvature_sign_profile(end, r_min, r_max, samples);

  double k_min = std::numeric_limits<double>::infinity(), k_max = -k_min;
  std::string csv = "r,K\n";
  for (const auto& [r, sign] : profile.samples) {
    const double k = radial_sectional_curvature(end, w0, r);
    k_min = std::min(k_min, k);
    k_max = std::max(k_max, k);
    csv += fmt(r) + "," + fmt(k) + "\n";
  }

  // Coarse cross-check against the finite-difference Christoffel route.
  double gap = 0.0;
  for (int i = 1; i <= 8; ++i) {
    const double r = r_min + (r_max - r_min) * i / 9.0;
    const double ks = radial_sectional_curvature(end, w0, r);
    const double ko = christoffel_curvature_oracle(end, w0, r, 1e-3);
    gap = std::max(gap, std::abs(ks - ko));
  }

  RunOutcome out;
  std::ostringstream os;
  os << "warp: " << cfg.warp << "\n";
  os << "r_min: " << fmt(r_min) << "\n";
  os << "r_max: " << fmt(r_max) << "\n";
  os << "samples: " << profile.samples.size() << "\n";
  os << "curvature_min: " << fmt(k_min) << "\n";
  os << "curvature_max: " << fmt(k_max) << "\n";
  os << "sign_has_negative: " << (profile.has_negative ? "true" : "false") << "\n";
  os << "sign_has_positive: " << (profile.has_positive ? "true" : "false") << "\n";
  os << "oracle_gap: " << fmt(gap) << "\n";
  out.report = os.str();
  write_artifact(out, opt, "curvature.csv", csv);
  finalize(out, cfg, opt, "curvature");
  return out;
}

RunOutcome run_criterion(const ExperimentConfig& cfg, const RunOptions& opt) {
  const EndSpec end = build_end(cfg);
  ComparisonWarp comparison = build_comparison(cfg, end);
  if (cfg.tail_r_max != 1e6)
    comparison.tail =
        tail_integral(comparison.phi_bar, comparison.r0, cfg.tail_r_max);

  SampleSpec ss;
  ss.seed = opt.has_seed ? opt.seed : cfg.seed;
  if (opt.resolution > 0) {
    ss.cross_per_dim = opt.resolution;
    ss.radial = 2 * opt.resolution;
  }
  const CriterionReport rep = check_criterion(end, comparison, ss);

  RunOutcome out;
  std::ostringstream os;
  os << "warp: " << cfg.warp << "\n";
  os << "comparison_warp: "
     << serialize(comparison.phi_bar.value.source()) << "\n";
  os << "comparison_r0: " << fmt(comparison.r0) << "\n";
  os << to_text(rep);
  out.report = os.str();
  finalize(out, cfg, opt, "criterion");
  return out;
}

RunOutcome run_barrier_audit(const ExperimentConfig& cfg, const RunOptions& opt) {
  const EndSpec end = build_end(cfg);
  const ComparisonWarp comparison = build_comparison(cfg, end);

  const GridSpec gs = grid_spec(cfg, opt);
  const double r_lo = std::max(end.r_start, comparison.r0);
  if (!(cfg.sigma_r_max > r_lo))
    throw ConfigError(cfg.path + ": sigma_r_max must exceed the barrier base radius");
  std::vector<double> rg(static_cast<std::size_t>(gs.radial_nodes));
  for (int i = 0; i < gs.radial_nodes; ++i)
    rg[static_cast<std::size_t>(i)] =
        r_lo + (cfg.sigma_r_max - r_lo) * (static_cast<double>(i) / (gs.radial_nodes - 1));

  Barrier barrier;
  if (end.cross_section.dimension() == 1) {
    barrier = barrier_2d(cfg.center0, comparison, rg);
  } else {
    Expr psi;
    const Expr* psi_ptr = nullptr;
    if (!cfg.psi.empty()) {
      psi = parse_data(cfg, cfg.psi, end.cross_section);
      psi_ptr = &psi;
    }
    const double hw1 = cfg.half_width1 > 0.0 ? cfg.half_width1 : cfg.half_width0;
    const CapChart chart = make_cap_chart(end.cross_section,
                                          {cfg.center0, cfg.center1},
                                          cfg.half_width0, hw1, psi_ptr);
    barrier = build_barrier(chart, comparison, rg);
  }

  AuditOptions ao;
  ao.cap_nodes = opt.resolution > 0 ? opt.resolution | 1 : cfg.cap_nodes;
  ao.angular_fraction = cfg.angular_fraction;
  ao.sigma_floor = cfg.sigma_floor;
  const AuditReport rep = audit_superharmonic(barrier, end, ao);

  RunOutcome out;
  std::ostringstream os;
  os << "warp: " << cfg.warp << "\n";
  os << "comparison_warp: "
     << serialize(barrier.phi_bar.value.source()) << "\n";
  os << "lambda1: " << fmt(barrier.eig.lambda1) << "\n";
  os << "sigma_r_max: " << fmt(cfg.sigma_r_max) << "\n";
  os << to_text(rep);
  out.report = os.str();

  std::string csv = "r,sigma\n";
  for (std::size_t i = 0; i < barrier.sigma.r.size(); ++i)
    csv += fmt(barrier.sigma.r[i]) + "," + fmt(barrier.sigma.sigma[i]) + "\n";
  write_artifact(out, opt, "sigma.csv", csv);
  finalize(out, cfg, opt, "barrier-audit");
  return out;
}

namespace {

void solve_report_body(std::ostringstream& os, const ManifoldConfig& manifold,
                       const DiscreteProblem& problem, const Eigen::VectorXd& u,
                       const SolveStats& stats) {
  const double u_min = u.minCoeff(), u_max = u.maxCoeff();
  const double band_tol =
      1e-9 * (1.0 + std::max(std::abs(manifold.data_min), std::abs(manifold.data_max)));
  const bool mp_ok = u_min >= manifold.data_min - band_tol &&
                     u_max <= manifold.data_max + band_tol;

  // Constants must be exactly discrete-harmonic on interior rows.
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(problem.matrix.rows());
  Eigen::VectorXd res = problem.matrix * ones;
  double cres = 0.0;
  for (Eigen::Index i = 0; i < res.size(); ++i)
    if (!problem.boundary[static_cast<std::size_t>(i)])
      cres = std::max(cres, std::abs(res[i]));

  os << "nodes: " << problem.grid.node_count() << "\n";
  os << "angular_nodes: " << problem.grid.m0
     << (problem.grid.m1 > 1 ? "x" + std::to_string(problem.grid.m1) : "") << "\n";
  os << "radial_nodes: " << problem.grid.radial_count() << "\n";
  os << "iterations: " << stats.iterations << "\n";
  os << "relative_residual: " << fmt(stats.relative_residual) << "\n";
  os << "solution_min: " << fmt(u_min) << "\n";
  os << "solution_max: " << fmt(u_max) << "\n";
  os << "data_min: " << fmt(manifold.data_min) << "\n";
  os << "data_max: " << fmt(manifold.data_max) << "\n";
  os << "max_principle_ok: " << (mp_ok ? "true" : "false") << "\n";
  os << "constants_residual: " << fmt(cres) << "\n";
  os << "stencil_sign_ok: " << (problem.stencil_sign_ok ? "true" : "false") << "\n";
  if (!problem.stencil_note.empty()) os << "stencil_note: " << problem.stencil_note << "\n";
}

}  // namespace

RunOutcome run_solve(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (cfg.schedule.empty())
    throw ConfigError(cfg.path + ": solve needs [exhaust] schedule (first entry is used)");
  const ManifoldConfig manifold = build_manifold(cfg);
  const GridSpec gs = grid_spec(cfg, opt);
  const double R = cfg.schedule.front();
  const DiscreteProblem problem = assemble(manifold, R, gs);
  SolveStats stats;
  const Eigen::VectorXd u = solve(problem, 1e-10, 20000, &stats);

  RunOutcome out;
  std::ostringstream os;
  os << "truncation: " << fmt(R) << "\n";
  solve_report_body(os, manifold, problem, u, stats);
  if (!cfg.probes.empty()) {
    std::vector<double> values(cfg.probes.size());
    for (std::size_t i = 0; i < cfg.probes.size(); ++i)
      values[i] = probe_value(problem.grid, u, cfg.probes[i]);
    os << probes_block(cfg.probes, values);
  }
  out.report = os.str();

  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    const auto dir = std::filesystem::path(opt.out_dir);
    write_solution_csv((dir / "solution.csv").string(), problem.grid, u);
    out.artifacts.push_back((dir / "solution.csv").string());
    write_solution_tensor((dir / "solution.bin").string(), problem.grid, u);
    out.artifacts.push_back((dir / "solution.bin").string());
  }
  finalize(out, cfg, opt, "solve");
  return out;
}

RunOutcome run_exhaust(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (cfg.schedule.empty() || cfg.probes.empty())
    throw ConfigError(cfg.path + ": exhaust needs [exhaust] schedule and probes");
  const ManifoldConfig manifold = build_manifold(cfg);
  const GridSpec gs = grid_spec(cfg, opt);
  const ExhaustResult ex =
      exhaust(manifold, cfg.schedule, cfg.probes, cfg.tol_exhaustion, gs);

  RunOutcome out;
  std::ostringstream os;
  os << to_text(ex);
  os << probes_block(cfg.probes, ex.probe_values);
  out.report = os.str();

  std::string trace_csv = "R,probe_oscillation,sup_change\n";
  for (const auto& e : ex.trace)
    trace_csv += fmt(e.truncation_radius) + "," + fmt(e.probe_oscillation) + "," +
                 fmt(e.sup_change) + "\n";
  write_artifact(out, opt, "trace.csv", trace_csv);
  if (!opt.out_dir.empty()) {
    const auto dir = std::filesystem::path(opt.out_dir);
    write_solution_csv((dir / "solution.csv").string(), ex.grid, ex.u);
    out.artifacts.push_back((dir / "solution.csv").string());
    write_solution_tensor((dir / "solution.bin").string(), ex.grid, ex.u);
    out.artifacts.push_back((dir / "solution.bin").string());
  }
  finalize(out, cfg, opt, "exhaust");
  return out;
}

RunOutcome run_liouville(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (cfg.topology != Topology::TwoEnds)
    throw ConfigError(cfg.path + ": liouville needs topology = two_ends");
  if (cfg.schedule.empty() || cfg.probes.empty())
    throw ConfigError(cfg.path + ": liouville needs [exhaust] schedule and probes");
  const ManifoldConfig manifold = build_manifold(cfg);
  const GridSpec gs = grid_spec(cfg, opt);
  const LiouvilleResult lw =
      liouville_witness(manifold, cfg.schedule, cfg.probes, cfg.tol_exhaustion, gs);

  // Certificate: separation >= 1/2 * osc(f) * sigma(r_probe), sigma built from
  // the plus end's comparison warp at the cross-section's first mode.
  const EndSpec end = build_end(cfg);
  const ComparisonWarp comparison = build_comparison(cfg, end);
  const double r_probe = max_probe_radius(cfg.probes);
  const double lambda1 =
      std::sqrt(end.cross_section.first_mode_eigenvalue());
  std::vector<double> rg(129);
  const double base = comparison.r0;
  const double top = std::max(r_probe, base + 1.0);
  for (std::size_t i = 0; i < rg.size(); ++i)
    rg[i] = base + (top - base) * (static_cast<double>(i) / (rg.size() - 1));
  const SigmaProfile sigma = sigma_profile(comparison, lambda1, rg);
  const double sigma_probe = sigma.value(r_probe);
  const double osc = lw.f_max - lw.f_min;
  const double required = 0.5 * osc * sigma_probe;

  const auto mode = radial_mode_oracle(
      manifold, end.cross_section.first_mode_eigenvalue(), cfg.schedule.back(),
      {r_probe});
  const double predicted = osc * mode.front();

  RunOutcome out;
  std::ostringstream os;
  os << to_text(lw.exhaust);
  os << probes_block(cfg.probes, lw.exhaust.probe_values);
  os << "f_min: " << fmt(lw.f_min) << "\n";
  os << "f_max: " << fmt(lw.f_max) << "\n";
  os << "separation: " << fmt(lw.separation) << "\n";
  os << "sigma_at_probe: " << fmt(sigma_probe) << "\n";
  os << "required_separation: " << fmt(required) << "\n";
  os << "predicted_separation: " << fmt(predicted) << "\n";
  os << "witness: " << (lw.separation >= required ? "true" : "false") << "\n";
  out.report = os.str();

  if (!opt.out_dir.empty()) {
    const auto dir = std::filesystem::path(opt.out_dir);
    std::filesystem::create_directories(dir);
    write_solution_csv((dir / "solution.csv").string(), lw.exhaust.grid, lw.exhaust.u);
    out.artifacts.push_back((dir / "solution.csv").string());
  }
  finalize(out, cfg, opt, "liouville");
  return out;
}

RunOutcome run_command(const std::string& command, const ExperimentConfig& cfg,
                       const RunOptions& opt) {
  if (command == "curvature") return run_curvature(cfg, opt);
  if (command == "criterion") return run_criterion(cfg, opt);
  if (command == "barrier-audit") return run_barrier_audit(cfg, opt);
  if (command == "solve") return run_solve(cfg, opt);
  if (command == "exhaust") return run_exhaust(cfg, opt);
  if (command == "liouville") return run_liouville(cfg, opt);
  throw ConfigError("unknown command: " + command);
}

}  // namespace ends
