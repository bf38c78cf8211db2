#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "icf/experiment.hpp"

namespace icf::fixtures {

inline Config config_from(const std::string& text, const std::vector<std::string>& overrides = {}) {
  return parse_config(text, overrides);
}

inline RunOutcome run_config(const Config& cfg) {
  ScalarField u0;
  const Plan plan = make_plan(cfg, &u0);
  return execute(plan, u0);
}

// Perturbed axisymmetric run on a coarse grid, cheap enough for unit tests.
inline const char* small_benchmark =
    "name = small\n"
    "[grid]\nn_dim = 2\ntheta_max = pi/3\nn_theta = 41\n"
    "[flow]\nalpha = 1\ns_end = 8\n"
    "[initial]\nr0 = 1\neps = 0.05\nk_radial = 1\n"
    "[output]\nrecord_every = 5\nsnapshot_count = 16\n";

inline const char* model_config =
    "name = model\n"
    "[grid]\nn_dim = 2\ntheta_max = pi/3\nn_theta = 21\n"
    "[flow]\nalpha = 1\nt_end = 4\n"
    "[initial]\nr0 = 1\neps = 0\n"
    "[output]\nrecord_every = 1\n";

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace icf::fixtures
