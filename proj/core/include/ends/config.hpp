#pragma once

// Experiment config files: flat sectioned `key = value` text with an optional
// [expect] block asserting report fields. Parse errors carry file:line.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ends/solver.hpp"

namespace ends {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

/// One [expect] assertion. Values are either a literal compared verbatim
/// against the report field, or `le:NUM` / `ge:NUM` / `near:NUM:TOL`.
struct ExpectRule {
  enum class Op { Equals, Le, Ge, Near };
  std::string key;
  Op op = Op::Equals;
  std::string literal;
  double number = 0.0;
  double tol = 0.0;
  int line = 0;
};

struct ExperimentConfig {
  std::string path;

  // [manifold]
  Topology topology = Topology::SingleEnd;
  std::string cross_kind = "circle";
  double torus_lu = 6.283185307179586;
  double torus_lv = 6.283185307179586;
  std::string warp;
  std::string warp_minus;
  double r_start = 0.0;
  double expansive_from = 0.0;
  double expansive_from_minus = 0.0;
  double validation_span = 100.0;
  std::string inner_data = "0";
  std::string data = "0";
  std::string data_minus = "0";

  // [comparison]: explicit warp text, or hyperbolic construction from `a`
  std::string comparison_warp;
  double comparison_r0 = -1.0;  // < 0: defaults to r_start
  double hyperbolic_a = 0.0;    // 0: no hyperbolic construction requested

  // [criterion]
  double tail_r_max = 1e6;

  // [barrier]
  double center0 = 0.0, center1 = 0.0;
  double half_width0 = 1.5707963267948966;
  double half_width1 = 0.0;  // 0: copy half_width0 on the torus
  std::string psi;
  double sigma_r_max = 60.0;
  double sigma_floor = 0.0;
  double angular_fraction = 1.0;
  int cap_nodes = 65;

  // [grid]
  int cross_nodes = 64;
  int radial_nodes = 129;
  bool graded = true;

  // [exhaust]
  std::vector<double> schedule;
  std::vector<ProbePoint> probes;
  double tol_exhaustion = 0.05;

  // [run]
  std::uint64_t seed = 0;

  std::vector<ExpectRule> expects;
};

ExperimentConfig load_config(const std::string& path);

/// Report text is `key: value` lines; later duplicates win.
std::map<std::string, std::string> parse_report(const std::string& report);

struct ExpectOutcome {
  ExpectRule rule;
  bool ok = false;
  std::string actual;  // report value, or "<missing>"
};

std::vector<ExpectOutcome> evaluate_expects(const std::vector<ExpectRule>& rules,
                                            const std::string& report);

}  // namespace ends
