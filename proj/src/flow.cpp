#include "icf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "icf/graph_geom.hpp"

namespace icf {

std::string_view to_string(Stepper s) { return s == Stepper::euler ? "euler" : "rk4"; }

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::reached_end: return "reached_end";
    case Termination::mean_convexity_lost: return "mean_convexity_lost";
    case Termination::blowup_detected: return "blowup_detected";
  }
  return "unknown";
}

const std::vector<std::string>& sample_column_names() {
  static const std::vector<std::string> names = {
      "t",          "s",     "u_min",   "u_max",   "phidot_theta_min", "phidot_theta_max",
      "sup_grad_phi", "H_theta_min", "H_theta_max", "area", "integral_u_minus_alpha",
      "H_min",      "w_min", "utilde_min", "utilde_max", "sup_grad_utilde"};
  return names;
}

std::vector<double> sample_values(const Sample& s) {
  return {s.t,           s.s,           s.u_min,    s.u_max,
          s.phidot_theta_min, s.phidot_theta_max, s.sup_grad_phi, s.H_theta_min,
          s.H_theta_max, s.area,        s.integral_u_minus_alpha, s.H_min,
          s.w_min,       s.utilde_min,  s.utilde_max, s.sup_grad_utilde};
}

Sample sample_from_values(const std::vector<double>& v) {
  if (v.size() != sample_columns) {
    throw Error(ErrorKind::invalid_argument, "sample row must have 16 columns");
  }
  Sample s;
  s.t = v[0];
  s.s = v[1];
  s.u_min = v[2];
  s.u_max = v[3];
  s.phidot_theta_min = v[4];
  s.phidot_theta_max = v[5];
  s.sup_grad_phi = v[6];
  s.H_theta_min = v[7];
  s.H_theta_max = v[8];
  s.area = v[9];
  s.integral_u_minus_alpha = v[10];
  s.H_min = v[11];
  s.w_min = v[12];
  s.utilde_min = v[13];
  s.utilde_max = v[14];
  s.sup_grad_utilde = v[15];
  return s;
}

void validate_params(const FlowParams& p) {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::invalid_argument, what); };
  if (!(p.alpha >= 0.0) || !std::isfinite(p.alpha)) bad("alpha must be >= 0");
  if (!(p.cfl_safety > 0.0 && p.cfl_safety <= 1.0)) bad("cfl_safety must lie in (0, 1]");
  if (!(p.t_end > 0.0) || !std::isfinite(p.t_end)) bad("end time must be positive");
  if (!(p.eps_mc > 0.0)) bad("eps_mc must be positive");
  if (p.record_every < 1) bad("record_every must be >= 1");
  for (double t : p.snapshot_times) {
    if (!(t >= 0.0) || !std::isfinite(t)) bad("snapshot times must be >= 0");
  }
}

namespace {

std::string mc_message(const kernels::RhsStatus& st) {
  return "mean convexity lost at node " + std::to_string(st.bad_node) + " (denominator " +
         std::to_string(st.bad_denominator) + ", H " + std::to_string(st.bad_mean_curvature) + ")";
}

struct Evaluator {
  const CapGrid& grid;
  kernels::RhsArgs args;
  bool parallel;

  void operator()(std::span<const double> phi, std::span<double> out,
                  std::span<double> rate = {}) const {
    const kernels::RhsStatus st = parallel ? kernels::rhs_parallel(grid, phi, args, out, rate)
                                           : kernels::rhs_serial(grid, phi, args, out, rate);
    if (!st.ok()) {
      throw Error(ErrorKind::mean_convexity_lost, mc_message(st), st.bad_node, st.bad_denominator);
    }
  }
};

void require_finite_stage(std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw Error(ErrorKind::blowup_detected, "non-finite value after stage at node " +
                                                  std::to_string(i),
                  i, v[i]);
    }
  }
}

double underflow_floor(const FlowParams& p) { return 1e-14 * std::max(1.0, p.t_end); }

// Advances phi by dt given k1 = rhs(phi).
std::vector<double> advance(const Evaluator& eval, Stepper stepper, std::span<const double> phi,
                            std::span<const double> k1, double dt) {
  const std::size_t n = phi.size();
  std::vector<double> out(n);
  if (stepper == Stepper::euler) {
    for (std::size_t i = 0; i < n; ++i) out[i] = phi[i] + dt * k1[i];
    require_finite_stage(out);
    return out;
  }
  std::vector<double> y(n), k2(n), k3(n), k4(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = phi[i] + 0.5 * dt * k1[i];
  require_finite_stage(y);
  eval(y, k2);
  for (std::size_t i = 0; i < n; ++i) y[i] = phi[i] + 0.5 * dt * k2[i];
  require_finite_stage(y);
  eval(y, k3);
  for (std::size_t i = 0; i < n; ++i) y[i] = phi[i] + dt * k3[i];
  require_finite_stage(y);
  eval(y, k4);
  const double sixth = dt / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = phi[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  require_finite_stage(out);
  return out;
}

// Sample from the physical log-radius phi and rescaled log-radius phi_tilde.
Sample measure(const CapGrid& grid, std::span<const double> phi, std::span<const double> phit,
               double t, double s, double alpha, const RescaleContext& ctx) {
  const double th = theta(t, ctx);
  const double th_alpha = std::pow(th, alpha);
  const double n = grid.n_dim();
  const int m = grid.angular_multiplicity();
  const std::size_t nn = grid.size();
  const double inf = std::numeric_limits<double>::infinity();

  Sample out;
  out.t = t;
  out.s = s;
  out.u_min = out.phidot_theta_min = out.H_theta_min = out.H_min = out.w_min = out.utilde_min = inf;
  out.u_max = out.phidot_theta_max = out.H_theta_max = out.utilde_max = -inf;
  std::vector<double> area(nn), integral(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    const detail::Jet jet = detail::node_jet(phi.data(), grid, i, true);
    const double p1 = jet.grad.e1;
    const double p2 = jet.grad.e2;
    const FrameSym& hs = jet.hess;
    const double grad2 = p1 * p1 + p2 * p2;
    const double v2 = 1.0 + grad2;
    const double v = std::sqrt(v2);
    const double tilt = p1 * p1 * hs.t11 + 2.0 * p1 * p2 * hs.t12 + p2 * p2 * hs.t22;
    const double denom = n - (trace(hs, m) - tilt / v2);
    const double u = std::exp(phi[i]);
    const double ut = std::exp(phit[i]);
    const double H = denom / (u * v);
    const double q = std::exp(-alpha * phi[i]) * v2 / denom;
    const double grad = std::sqrt(grad2);

    out.u_min = std::min(out.u_min, u);
    out.u_max = std::max(out.u_max, u);
    out.phidot_theta_min = std::min(out.phidot_theta_min, q * th_alpha);
    out.phidot_theta_max = std::max(out.phidot_theta_max, q * th_alpha);
    out.sup_grad_phi = std::max(out.sup_grad_phi, grad);
    out.H_theta_min = std::min(out.H_theta_min, H * th);
    out.H_theta_max = std::max(out.H_theta_max, H * th);
    out.H_min = std::min(out.H_min, H);
    out.w_min = std::min(out.w_min, u / v);
    out.utilde_min = std::min(out.utilde_min, ut);
    out.utilde_max = std::max(out.utilde_max, ut);
    out.sup_grad_utilde = std::max(out.sup_grad_utilde, ut * grad);
    area[i] = std::pow(u, n) * v;
    integral[i] = std::pow(u, n - alpha) * v;
  }
  out.area = integrate(area, grid);
  out.integral_u_minus_alpha = integrate(integral, grid);
  return out;
}

ScalarField to_field(const CapGrid& grid, std::vector<double> values) {
  ScalarField f;
  f.grid_id = grid.id();
  f.neumann = true;
  f.values = std::move(values);
  return f;
}

}  // namespace

ScalarField rhs_Q(const ScalarField& phi, const CapGrid& grid, double alpha, double eps_mc) {
  require_same_grid(phi.grid_id, grid);
  require_finite(phi.values, "rhs_Q input");
  ScalarField out = to_field(grid, std::vector<double>(grid.size()));
  kernels::RhsArgs args;
  args.alpha = alpha;
  args.eps_mc = eps_mc;
  Evaluator{grid, args, false}(phi.values, out.values);
  return out;
}

double stable_dt(const FlowState& state, const CapGrid& grid, const FlowParams& params) {
  require_same_grid(state.phi.grid_id, grid);
  std::vector<double> q(grid.size()), rate(grid.size());
  kernels::RhsArgs args;
  args.alpha = params.alpha;
  args.eps_mc = params.eps_mc;
  Evaluator{grid, args, params.parallel}(state.phi.values, q, rate);
  const double dt = params.cfl_safety * kernels::min_step_ratio(grid, rate);
  if (!(dt >= underflow_floor(params))) {
    throw Error(ErrorKind::blowup_detected, "blowup detected: step size underflow", no_node, dt);
  }
  return dt;
}

FlowState step(const FlowState& state, const CapGrid& grid, const FlowParams& params, double dt,
               double offset) {
  require_same_grid(state.phi.grid_id, grid);
  kernels::RhsArgs args;
  args.alpha = params.alpha;
  args.offset = offset;
  args.eps_mc = params.eps_mc;
  const Evaluator eval{grid, args, params.parallel};
  std::vector<double> k1(grid.size());
  eval(state.phi.values, k1);
  FlowState next;
  next.t = state.t + dt;
  next.phi = to_field(grid, advance(eval, params.stepper, state.phi.values, k1, dt));
  return next;
}

Sample measure_sample(const ScalarField& phi, const CapGrid& grid, double t, double alpha,
                      const RescaleContext& ctx) {
  require_same_grid(phi.grid_id, grid);
  const double lt = std::log(theta(t, ctx));
  std::vector<double> phit(phi.values);
  for (double& x : phit) x -= lt;
  return measure(grid, phi.values, phit, t, time_map(t, ctx, TimeDirection::t_to_s), alpha, ctx);
}

void validate_initial_data(const ScalarField& u0, const CapGrid& grid, double eps_mc) {
  require_same_grid(u0.grid_id, grid);
  require_finite(u0.values, "initial data");
  require_positive(u0);
  GeometryOptions opts;
  opts.enforce_mean_convexity = false;
  ScalarField u = u0;
  u.neumann = true;
  const GraphGeometry geo = graph_geometry(u, grid, opts);
  std::size_t worst = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (geo.mean_curv[i] < geo.mean_curv[worst]) worst = i;
  }
  if (!(geo.mean_curv[worst] > eps_mc)) {
    throw Error(ErrorKind::initial_not_mean_convex,
                "initial data not mean convex: min H = " + std::to_string(geo.mean_curv[worst]) +
                    " at node " + std::to_string(worst),
                worst, geo.mean_curv[worst]);
  }

  // Discrete compatibility: one-sided boundary slope of phi must be O(h^2).
  std::vector<double> phi(u0.values);
  for (double& x : phi) x = std::log(x);
  const double h = grid.h_theta();
  double curv = 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    curv = std::max(curv, std::abs(detail::node_jet(phi.data(), grid, i, false).hess.t11));
  }
  const double tol = 1e-10 + 10.0 * curv * h * h;
  for (std::size_t b : grid.boundary_index()) {
    const double slope = detail::d_theta(phi, grid, b);
    if (std::abs(slope) > tol) {
      throw Error(ErrorKind::invalid_argument,
                  "initial data violates the Neumann condition at node " + std::to_string(b), b,
                  slope);
    }
  }
}

ScalarField make_initial_data(const CapGrid& grid, const InitialFamily& family, double eps_mc) {
  if (!(family.r0 > 0.0)) throw Error(ErrorKind::invalid_argument, "r0 must be positive");
  if (!(std::abs(family.eps) < 1.0)) {
    throw Error(ErrorKind::eps_too_large, "eps too large: |eps| must be < 1", no_node, family.eps);
  }
  if (family.k_radial < 0 || family.m_angular < 0) {
    throw Error(ErrorKind::invalid_argument, "mode numbers must be >= 0");
  }
  const double tm = grid.theta_max();
  std::function<double(double, double)> f;
  if (grid.mode() == GridMode::full2d && family.m_angular > 0) {
    const int m = family.m_angular;
    const double sm = std::sin(tm);
    const double cot = std::cos(tm) / sm;
    const double b = -m * cot / (sm + m * cot * (1.0 - std::cos(tm)));
    f = [=](double th, double ps) {
      const double fm = std::pow(std::sin(th) / sm, m) * (1.0 + b * (1.0 - std::cos(th)));
      return family.r0 * (1.0 + family.eps * fm * std::cos(m * ps));
    };
  } else {
    const double k = family.k_radial;
    f = [=](double th, double) {
      return family.r0 * (1.0 + family.eps * std::cos(k * std::numbers::pi * th / tm));
    };
  }
  ScalarField u0 = make_field(grid, f, true);
  validate_initial_data(u0, grid, eps_mc);
  return u0;
}

namespace detail {

Trajectory integrate(const ScalarField& phi0, const CapGrid& grid, const FlowParams& params,
                     const RescaleContext& ctx, bool rescaled) {
  validate_params(params);
  require_same_grid(phi0.grid_id, grid);
  const double offset = rescaled ? 1.0 / grid.n_dim() : 0.0;

  Trajectory traj;
  traj.grid = grid;
  traj.params = params;
  traj.ctx = ctx;
  traj.rescaled = rescaled;

  std::vector<double> targets;
  for (double x : params.snapshot_times) {
    if (x > 0.0 && x < params.t_end) targets.push_back(x);
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  targets.push_back(params.t_end);

  kernels::RhsArgs args;
  args.alpha = params.alpha;
  args.offset = offset;
  args.eps_mc = params.eps_mc;
  const Evaluator eval{grid, args, params.parallel};

  std::vector<double> phi(phi0.values);
  std::vector<double> other(grid.size());
  double tau = 0.0;

  auto physical_time = [&](double x) {
    return rescaled ? time_map(x, ctx, TimeDirection::s_to_t) : x;
  };
  auto record = [&](bool snapshot) {
    const double t = physical_time(tau);
    const double lt = std::log(theta(t, ctx));
    for (std::size_t i = 0; i < phi.size(); ++i) other[i] = rescaled ? phi[i] + lt : phi[i] - lt;
    const std::span<const double> phys = rescaled ? std::span<const double>(other) : phi;
    const std::span<const double> tilde = rescaled ? std::span<const double>(phi) : other;
    const double s = rescaled ? tau : time_map(t, ctx, TimeDirection::t_to_s);
    traj.samples.push_back(measure(grid, phys, tilde, t, s, params.alpha, ctx));
    if (snapshot) {
      std::vector<double> u(phys.begin(), phys.end());
      for (double& x : u) x = std::exp(x);
      traj.snapshots.push_back({t, s, to_field(grid, std::move(u))});
    }
  };

  record(true);
  std::size_t next = 0;
  std::vector<double> k1(grid.size()), rate(grid.size());
  const double floor = underflow_floor(params);
  try {
    while (next < targets.size()) {
      eval(phi, k1, rate);
      const double dt_stable = params.cfl_safety * kernels::min_step_ratio(grid, rate);
      if (!(dt_stable >= floor)) {
        throw Error(ErrorKind::blowup_detected, "blowup detected: step size underflow", no_node,
                    dt_stable);
      }
      const double target = targets[next];
      const double remaining = target - tau;
      double dt = dt_stable;
      bool hit = false;
      if (remaining <= dt) {
        dt = remaining;
        hit = true;
      } else if (remaining < 2.0 * dt) {
        dt = 0.5 * remaining;
      }
      phi = advance(eval, params.stepper, phi, k1, dt);
      tau = hit ? target : tau + dt;
      ++traj.steps;
      if (hit) {
        ++next;
        record(true);
      } else if (traj.steps % static_cast<std::size_t>(params.record_every) == 0) {
        record(false);
      }
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::mean_convexity_lost && e.kind() != ErrorKind::blowup_detected) {
      throw;
    }
    traj.termination = e.kind() == ErrorKind::mean_convexity_lost
                           ? Termination::mean_convexity_lost
                           : Termination::blowup_detected;
    traj.message = e.what();
    if (traj.samples.back().t < physical_time(tau)) record(true);
  }
  return traj;
}

}  // namespace detail

Trajectory run_flow(const ScalarField& u0, const CapGrid& grid, const FlowParams& params,
                    const RescaleContext& ctx) {
  validate_params(params);
  validate_initial_data(u0, grid, params.eps_mc);
  ScalarField phi = u0;
  phi.neumann = true;
  for (double& x : phi.values) x = std::log(x);
  return detail::integrate(phi, grid, params, ctx, false);
}

}  // namespace icf
