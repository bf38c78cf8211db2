#pragma once

// Orchestration of runs, replays and convergence studies.
//
// Exit codes: 0 run completed and every enabled check passed, 1 a check
// failed (or a replay did not reproduce the report), 2 abnormal termination
// or invalid initial data, 3 configuration error.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "icf/config.hpp"
#include "icf/flow.hpp"
#include "icf/verifier.hpp"

namespace icf {

inline constexpr int exit_ok = 0;
inline constexpr int exit_checks_failed = 1;
inline constexpr int exit_abnormal = 2;
inline constexpr int exit_config = 3;

/// Everything derived from a config before stepping.
struct Plan {
  Config config;
  CapGrid grid;
  FlowParams params;
  RescaleContext ctx;
  VerifyOptions verify;
  std::vector<std::string> checks;
  bool rescaled = false;
};

/// Builds the grid, initial data (returned via `u0`) and resolved gauge.
/// Throws Error from the grid, initial-data and gauge validation.
Plan make_plan(const Config& cfg, ScalarField* u0);

struct RunOutcome {
  Trajectory trajectory;
  EstimateReport report;
  int exit_code = exit_ok;
};

/// Runs the plan from u0 (no files).
RunOutcome execute(const Plan& plan, const ScalarField& u0);

/// Full experiment: run, verify, write artifacts to out_dir.
int run_experiment(const Config& cfg, const std::filesystem::path& out_dir, std::ostream& log);

/// Rebuilds the trajectory from a run directory and re-verifies it. Exit 1
/// when the regenerated report differs from report.json.
int verify_directory(const std::filesystem::path& dir, std::ostream& log);

/// Runs the config over the grid list and writes orders.csv to out_dir.
int convergence_study(const Config& cfg, const std::vector<int>& grids,
                      const std::filesystem::path& out_dir, std::ostream& log);

/// Observed convergence order log(e0 / e1) / log(h0 / h1).
double observed_order(double e0, double e1, double h0, double h1);

}  // namespace icf
