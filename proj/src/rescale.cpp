#include "icf/rescale.hpp"

#include <cmath>

namespace icf {

double theta(double t, const RescaleContext& ctx) {
  if (!(t >= 0.0)) throw Error(ErrorKind::invalid_argument, "theta: t must be >= 0", no_node, t);
  const double n = ctx.n_dim;
  if (ctx.alpha == 0.0) return std::exp(ctx.c + t / n);
  // (alpha t / n + e^{alpha c})^{1/alpha}, written to stay accurate for small alpha
  return std::exp(ctx.c + std::log1p(ctx.alpha * t / (n * std::exp(ctx.alpha * ctx.c))) / ctx.alpha);
}

double time_map(double value, const RescaleContext& ctx, TimeDirection direction) {
  if (!(value >= 0.0)) {
    throw Error(ErrorKind::invalid_argument, "time_map: negative input", no_node, value);
  }
  if (ctx.alpha == 0.0) return value;
  const double n = ctx.n_dim;
  const double base = n * std::exp(ctx.alpha * ctx.c) / ctx.alpha;
  if (direction == TimeDirection::t_to_s) return n / ctx.alpha * std::log1p(value / base);
  return base * std::expm1(ctx.alpha * value / n);
}

RescaleContext midpoint_context(double alpha, int n_dim, double phi_min, double phi_max) {
  RescaleContext ctx;
  ctx.alpha = alpha;
  ctx.n_dim = n_dim;
  ctx.c = 0.5 * (phi_min + phi_max);
  return ctx;
}

void validate_context(const RescaleContext& ctx, double phi_min, double phi_max) {
  if (!(ctx.alpha >= 0.0)) throw Error(ErrorKind::config_value, "rescale: alpha must be >= 0");
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(phi_min), std::abs(phi_max)));
  if (!(ctx.c >= phi_min - slack && ctx.c <= phi_max + slack)) {
    throw Error(ErrorKind::config_value,
                "rescale.c must lie in [inf log u0, sup log u0] = [" + std::to_string(phi_min) +
                    ", " + std::to_string(phi_max) + "]",
                no_node, ctx.c);
  }
}

ScalarField rescaled_field(const Snapshot& snap, const RescaleContext& ctx) {
  ScalarField out = snap.u;
  const double th = theta(snap.t, ctx);
  for (double& x : out.values) x /= th;
  return out;
}

Trajectory rescale_trajectory(const Trajectory& traj, const RescaleContext& ctx) {
  Trajectory out = traj;
  out.ctx = ctx;
  const double alpha = traj.params.alpha;
  for (Sample& row : out.samples) {
    const double r = theta(row.t, traj.ctx) / theta(row.t, ctx);
    const double r_alpha = std::pow(r, alpha);
    row.s = time_map(row.t, ctx, TimeDirection::t_to_s);
    row.phidot_theta_min /= r_alpha;
    row.phidot_theta_max /= r_alpha;
    row.H_theta_min /= r;
    row.H_theta_max /= r;
    row.utilde_min *= r;
    row.utilde_max *= r;
    row.sup_grad_utilde *= r;
  }
  for (Snapshot& snap : out.snapshots) snap.s = time_map(snap.t, ctx, TimeDirection::t_to_s);
  return out;
}

Trajectory run_rescaled_flow(const ScalarField& u0_tilde, const CapGrid& grid,
                             const FlowParams& params, const RescaleContext& ctx) {
  validate_params(params);
  if (ctx.n_dim != grid.n_dim() || ctx.alpha != params.alpha) {
    throw Error(ErrorKind::invalid_argument, "rescale context does not match grid/params");
  }
  ScalarField u0 = u0_tilde;
  const double th0 = theta(0.0, ctx);
  for (double& x : u0.values) x *= th0;
  validate_initial_data(u0, grid, params.eps_mc);
  ScalarField phi = u0_tilde;
  phi.neumann = true;
  for (double& x : phi.values) x = std::log(x);
  return detail::integrate(phi, grid, params, ctx, true);
}

}  // namespace icf
