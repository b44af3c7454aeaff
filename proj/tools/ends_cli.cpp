// Command-line front end: wires a config file to one experiment, prints the
// report, and exits 0 iff every applicable [expect] assertion holds.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>

#include "ends/experiment.hpp"

namespace {

std::string describe(const ends::ExpectRule& rule) {
  using Op = ends::ExpectRule::Op;
  switch (rule.op) {
    case Op::Equals: return "= " + rule.literal;
    case Op::Le: return "<= " + std::to_string(rule.number);
    case Op::Ge: return ">= " + std::to_string(rule.number);
    case Op::Near:
      return "~ " + std::to_string(rule.number) + " +- " + std::to_string(rule.tol);
  }
  return "?";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet problems at infinity on warped-product ends"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int resolution = 0;
  std::uint64_t seed = 0;
  bool strict = false;

  const std::pair<const char*, const char*> commands[] = {
      {"curvature", "Radial curvature profile and sign summary"},
      {"criterion", "Comparison-warp solvability criterion"},
      {"barrier-audit", "Discrete superharmonicity audit of the local barrier"},
      {"solve", "One truncated Dirichlet solve"},
      {"exhaust", "Exhaustion over a truncation schedule"},
      {"liouville", "Two-end bounded nonconstant harmonic witness"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "directory for artifacts (reports, CSV, tensors)");
    sub->add_option("--resolution", resolution,
                    "override angular node count (radial scales proportionally)");
    sub->add_option("--seed", seed, "override the sampling seed");
    sub->add_flag("--expect-strict", strict,
                  "fail when no expect rule applies to this command");
  }

  CLI11_PARSE(app, argc, argv);
  auto* sub = app.get_subcommands().front();

  ends::RunOptions opt;
  opt.out_dir = out_dir;
  opt.resolution = resolution;
  opt.seed = seed;
  opt.has_seed = sub->count("--seed") > 0;
  opt.strict = strict;

  try {
    const ends::ExperimentConfig cfg = ends::load_config(config_path);
    const ends::RunOutcome out = ends::run_command(sub->get_name(), cfg, opt);
    std::cout << out.report;
    for (const auto& path : out.artifacts) std::cout << "wrote: " << path << "\n";
    int failed = 0;
    for (const auto& e : out.expects) {
      if (!e.ok) ++failed;
      std::cout << "expect " << (e.ok ? "PASS" : "FAIL") << ": " << e.rule.key
                << " " << describe(e.rule) << " (got " << e.actual << ")\n";
    }
    if (!out.expects.empty())
      std::cout << "expects: " << (out.expects.size() - failed) << " passed, "
                << failed << " failed\n";
    else if (strict)
      std::cout << "expects: none applicable (strict mode)\n";
    return out.expects_ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
