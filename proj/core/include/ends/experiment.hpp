#pragma once

// One entry point per CLI subcommand. Each runner builds the objects a config
// describes, produces a key: value report, evaluates the [expect] block
// against it, and (optionally) writes artifacts to an output directory.

#include <string>
#include <vector>

#include "ends/config.hpp"
#include "ends/criteria.hpp"

namespace ends {

struct RunOptions {
  std::string out_dir;     // empty: no artifacts
  int resolution = 0;      // > 0: overrides the angular node count, radial scaled
  std::uint64_t seed = 0;  // effective only with has_seed
  bool has_seed = false;
  bool strict = false;     // expect block must exist and every key must match
};

struct RunOutcome {
  std::string report;
  std::vector<ExpectOutcome> expects;
  std::vector<std::string> artifacts;
  bool expects_ok = true;
};

EndSpec build_end(const ExperimentConfig& cfg);
EndSpec build_end_minus(const ExperimentConfig& cfg);
ManifoldConfig build_manifold(const ExperimentConfig& cfg);
ComparisonWarp build_comparison(const ExperimentConfig& cfg, const EndSpec& end);

RunOutcome run_curvature(const ExperimentConfig& cfg, const RunOptions& opt);
RunOutcome run_criterion(const ExperimentConfig& cfg, const RunOptions& opt);
RunOutcome run_barrier_audit(const ExperimentConfig& cfg, const RunOptions& opt);
RunOutcome run_solve(const ExperimentConfig& cfg, const RunOptions& opt);
RunOutcome run_exhaust(const ExperimentConfig& cfg, const RunOptions& opt);
RunOutcome run_liouville(const ExperimentConfig& cfg, const RunOptions& opt);

/// Dispatch by subcommand name (curvature | criterion | barrier-audit |
/// solve | exhaust | liouville).
RunOutcome run_command(const std::string& command, const ExperimentConfig& cfg,
                       const RunOptions& opt);

}  // namespace ends
