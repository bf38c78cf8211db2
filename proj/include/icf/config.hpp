#pragma once

// Experiment configuration.
//
// Grammar (one item per line):
//   # comment            ; comment
//   name = <text>        (before any section)
//   [section]
//   key = value
// Numbers accept the forms 1.5, 1e-3, pi, pi/3, 2*pi/5 (products and quotients
// of literals and pi). Lists are comma separated. Unknown sections or keys,
// duplicate keys and malformed lines are errors.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "icf/flow.hpp"
#include "icf/verifier.hpp"

namespace icf {

enum class TimeVariable { t, s };

struct Config {
  std::string name = "experiment";

  int n_dim = 2;
  double theta_max = 1.5707963267948966;
  GridMode mode = GridMode::axisymmetric;
  int n_theta = 101;
  int n_psi = 16;

  double alpha = 1.0;
  std::optional<double> t_end;
  std::optional<double> s_end;
  TimeVariable time_variable = TimeVariable::t;
  Stepper stepper = Stepper::rk4;
  double cfl_safety = 0.4;
  double eps_mc = 1e-8;
  bool parallel = true;

  InitialFamily initial;

  /// Empty means the midpoint of [inf log u0, sup log u0].
  std::optional<double> c;

  std::string out_dir = "out";
  int record_every = 1;
  /// Extra snapshot instants in the integration variable.
  std::vector<double> snapshot_times;
  /// Evenly spaced snapshots over the run (0 disables).
  int snapshot_count = 20;

  /// Enabled checks; empty = all.
  std::vector<std::string> checks;
  VerifyOptions verify;
  /// Centre and spacing of the identity-check snapshots, in the integration
  /// variable, as fractions of the end time.
  double identity_fraction = 0.5;
  double identity_delta = 1e-3;
};

/// `overrides` are "section.key=value" (or "name=value") applied after the text.
Config parse_config(const std::string& text,
                    const std::vector<std::string>& overrides = {});
Config load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Effective configuration with every key written out; parse_config(echo(c))
/// reproduces c.
std::string echo_config(const Config& cfg);

/// Parses a number in the grammar above; throws config_value on failure.
double parse_number(const std::string& text);

}  // namespace icf
