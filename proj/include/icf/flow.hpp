#pragma once

// Explicit integration of the Neumann problem for phi = log u,
//   d phi / dt = Q(phi, D phi, D^2 phi),   d phi / d theta = 0 at theta_max.

#include <cstddef>
#include <string>
#include <vector>

#include "icf/gauge.hpp"
#include "icf/kernels.hpp"
#include "icf/sphere_geom.hpp"

namespace icf {

enum class Stepper { euler, rk4 };
enum class Termination { reached_end, mean_convexity_lost, blowup_detected };

std::string_view to_string(Stepper s);
std::string_view to_string(Termination t);

struct FlowParams {
  double alpha = 1.0;
  double cfl_safety = 0.4;
  /// End of the integration variable: t for run_flow, s for run_rescaled_flow.
  double t_end = 1.0;
  Stepper stepper = Stepper::rk4;
  double eps_mc = 1e-8;
  /// Extra instants (integration variable) the stepper lands on exactly.
  std::vector<double> snapshot_times;
  int record_every = 1;
  bool parallel = true;
};

void validate_params(const FlowParams& params);

/// One time-series row. Columns ending in _theta are scaled by Theta(t, c),
/// the tilde columns are u / Theta.
struct Sample {
  double t = 0.0;
  double s = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  double phidot_theta_min = 0.0;
  double phidot_theta_max = 0.0;
  double sup_grad_phi = 0.0;
  double H_theta_min = 0.0;
  double H_theta_max = 0.0;
  double area = 0.0;
  double integral_u_minus_alpha = 0.0;
  double H_min = 0.0;
  double w_min = 0.0;
  double utilde_min = 0.0;
  double utilde_max = 0.0;
  double sup_grad_utilde = 0.0;
};

inline constexpr std::size_t sample_columns = 16;
const std::vector<std::string>& sample_column_names();
std::vector<double> sample_values(const Sample& s);
Sample sample_from_values(const std::vector<double>& v);

/// Physical radius field at physical time t.
struct Snapshot {
  double t = 0.0;
  double s = 0.0;
  ScalarField u;
};

struct Trajectory {
  CapGrid grid;
  FlowParams params;
  RescaleContext ctx;
  /// True when the run integrated the rescaled equation in s.
  bool rescaled = false;
  std::vector<Sample> samples;
  std::vector<Snapshot> snapshots;
  Termination termination = Termination::reached_end;
  std::string message;
  std::size_t steps = 0;
};

struct FlowState {
  double t = 0.0;
  ScalarField phi;
};

/// Q at every node; throws mean_convexity_lost naming the node and denominator.
ScalarField rhs_Q(const ScalarField& phi, const CapGrid& grid, double alpha, double eps_mc = 1e-8);

/// cfl_safety * min spacing^2 / (2 n lambda_max). Throws blowup_detected when
/// the step underflows 1e-14 * max(1, t_end).
double stable_dt(const FlowState& state, const CapGrid& grid, const FlowParams& params);

/// One explicit step of size dt (offset as for the rescaled equation).
FlowState step(const FlowState& state, const CapGrid& grid, const FlowParams& params, double dt,
               double offset = 0.0);

Trajectory run_flow(const ScalarField& u0, const CapGrid& grid, const FlowParams& params,
                    const RescaleContext& ctx);

/// Diagnostics of the physical field exp(phi) at physical time t.
Sample measure_sample(const ScalarField& phi, const CapGrid& grid, double t, double alpha,
                      const RescaleContext& ctx);

struct InitialFamily {
  double r0 = 1.0;
  double eps = 0.0;
  int k_radial = 1;
  int m_angular = 0;
};

/// Axisymmetric family r0 (1 + eps cos(k pi theta / theta_max)); with
/// m_angular > 0 on a full2d grid r0 (1 + eps f_m(theta) cos(m psi)) where
/// f_m = (sin theta / sin theta_max)^m (1 + b (1 - cos theta)) and b makes
/// f_m'(theta_max) = 0.
ScalarField make_initial_data(const CapGrid& grid, const InitialFamily& family,
                              double eps_mc = 1e-8);

/// Throws unless u0 > 0, H > eps_mc and the boundary slope is O(h^2).
void validate_initial_data(const ScalarField& u0, const CapGrid& grid, double eps_mc);

namespace detail {

/// Shared loop behind run_flow and run_rescaled_flow. `phi0` is the evolved
/// unknown; with `rescaled` it is log(u / Theta) and time is s.
Trajectory integrate(const ScalarField& phi0, const CapGrid& grid, const FlowParams& params,
                     const RescaleContext& ctx, bool rescaled);

}  // namespace detail

}  // namespace icf
