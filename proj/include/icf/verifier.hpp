#pragma once

// Checks of the a priori estimates over recorded trajectories.
//
// Sign convention for every CheckResult: `margin` is the signed, normalized
// distance to the exact bound (negative = violated) and `tolerance` the
// discretization slack, so passed == (margin >= -tolerance).

#include <cstddef>
#include <string>
#include <vector>

#include "icf/flow.hpp"

namespace icf {

struct CheckResult {
  std::string name;
  bool passed = false;
  double margin = 0.0;
  double tolerance = 0.0;
  double worst_time = 0.0;
  std::size_t worst_node = no_node;
  std::string details;
};

struct DerivedConstants {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double v_max = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double lambda_fit = 0.0;
  double r2_fit = 0.0;
  double r_inf = 0.0;
  double radius_lower = 0.0;
  double radius_upper = 0.0;
};

struct EstimateReport {
  std::string name;
  CapGrid grid;
  FlowParams params;
  RescaleContext ctx;
  bool rescaled = false;
  Termination termination = Termination::reached_end;
  std::string termination_message;
  std::vector<CheckResult> checks;
  DerivedConstants constants;
  bool passed = false;
};

struct EvolutionOptions {
  /// Physical time of the middle snapshot; its neighbours are the adjacent
  /// snapshots, which may be unevenly spaced.
  double time = 0.0;
  /// Tolerance C (delta^2 / T^2 + h^2).
  double C = 50.0;
  /// Multiplies the speed on the right-hand sides (fault injection).
  double phi_scale = 1.0;
};

struct VerifyOptions {
  double c0_C = 1.0;
  double phidot_C = 1.0;
  double grad_tau = 1e-10;
  double grad_tau_step = 1e-10;
  double H_C = 1.0;
  /// Scales the (c3, c4) band around its centre; 1 is the estimate itself.
  double H_band_scale = 1.0;
  double area_C = 1.0;
  double area_floor = 1e-6;
  EvolutionOptions identities;
  double holder_beta = 0.5;
  /// Spatial pair radius in units of h_theta.
  double holder_radius = 2.5;
  double holder_growth = 1.5;
  double holder_floor = 1e-8;
  double decay_burn_in = 1.0;
  double decay_r2_min = 0.98;
  double decay_noise = 1e-11;
  double radius_C = 1.0;
  double roundness = 1e-3;
  double radius_grad = 1e-3;
};

/// Names of all checks in report order.
const std::vector<std::string>& check_names();

/// phi1, phi2, c1..c4, m1, m2, v_max from the first row and the gauge.
DerivedConstants derive_constants(const Trajectory& traj);

CheckResult check_c0(const Trajectory& traj, double C = 1.0);
CheckResult check_phidot(const Trajectory& traj, double C = 1.0);
CheckResult check_gradient_monotone(const Trajectory& traj, double tau = 1e-10,
                                    double tau_step = 1e-10);
CheckResult check_H_theta(const Trajectory& traj, double C = 1.0, double band_scale = 1.0);
CheckResult check_area_law(const Trajectory& traj, double C = 1.0, double floor = 1e-6);
/// Max relative residual of the area law over interior rows.
double area_law_residual(const Trajectory& traj, double* worst_time = nullptr);
CheckResult check_evolution_identities(const Trajectory& traj, const EvolutionOptions& opts);
CheckResult check_holder_diagnostic(const Trajectory& traj, const VerifyOptions& opts);

struct DecayFit {
  double lambda = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
  double s_first = 0.0;
  double s_last = 0.0;
  bool degenerate = false;
};
DecayFit fit_gradient_decay(const Trajectory& traj, double noise = 1e-11);
CheckResult check_gradient_decay(const Trajectory& traj, double burn_in = 1.0,
                                 double r2_min = 0.98, double noise = 1e-11);

struct RadiusEstimate {
  double r_inf = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double spread = 0.0;
  double grad = 0.0;
};
RadiusEstimate estimate_radius(const Trajectory& traj);
CheckResult check_radius(const Trajectory& traj, double C = 1.0, double roundness = 1e-3,
                         double grad_threshold = 1e-3);

/// Throws nothing_verified when `checks` is empty.
EstimateReport build_report(std::vector<CheckResult> checks, const DerivedConstants& constants,
                            const Trajectory& traj, const std::string& name);

/// Runs the enabled checks (all when `enabled` is empty) and builds the report.
EstimateReport verify_trajectory(const Trajectory& traj, const VerifyOptions& opts,
                                 const std::vector<std::string>& enabled, const std::string& name);

}  // namespace icf
