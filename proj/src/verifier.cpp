#include "icf/verifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "icf/graph_geom.hpp"
#include "icf/rescale.hpp"

namespace icf {

namespace {

std::string num(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double h2(const Trajectory& traj) { return traj.grid.h_theta() * traj.grid.h_theta(); }

double slack(const Trajectory& traj, double C) { return std::max(1e-8, C * h2(traj)); }

void require_rows(const Trajectory& traj, std::size_t n, const char* what) {
  if (traj.samples.size() < n) {
    throw Error(ErrorKind::invalid_argument,
                std::string(what) + ": trajectory has too few samples");
  }
}

CheckResult finish(CheckResult r) {
  if (!std::isfinite(r.margin)) {
    r.passed = false;
    r.margin = -std::numeric_limits<double>::max();
  } else {
    r.passed = r.margin >= -r.tolerance;
  }
  return r;
}

// Log of the model radius with reference constant c.
double log_model(double t, double alpha, int n, double c) {
  return std::log(theta(t, RescaleContext{alpha, n, c}));
}

// Round-off level of sup|D u~|: an absolute floor, raised to 10x the smallest
// value seen over the trailing 5% of rows so a plateau of rounding noise is
// never mistaken for decay.
double decay_floor(const std::vector<Sample>& rows, double noise) {
  double floor = noise * std::max(1.0, rows.front().sup_grad_utilde);
  const std::size_t tail = std::max<std::size_t>(1, rows.size() / 20);
  double tail_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = rows.size() - tail; k < rows.size(); ++k) {
    tail_min = std::min(tail_min, rows[k].sup_grad_utilde);
  }
  return std::max(floor, 10.0 * tail_min);
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "c0",   "phidot", "gradient_monotone", "H_theta", "area_law", "evolution_identities",
      "holder", "gradient_decay", "radius"};
  return names;
}

DerivedConstants derive_constants(const Trajectory& traj) {
  require_rows(traj, 1, "derive_constants");
  const Sample& r0 = traj.samples.front();
  const double alpha = traj.params.alpha;
  const double n = traj.grid.n_dim();
  DerivedConstants k;
  k.phi1 = std::log(r0.u_min);
  k.phi2 = std::log(r0.u_max);
  k.c1 = std::exp(k.phi1 - traj.ctx.c);
  k.c2 = std::exp(k.phi2 - traj.ctx.c);
  k.m1 = std::min(r0.phidot_theta_min, 1.0 / n);
  k.m2 = std::max(r0.phidot_theta_max, 1.0 / n);
  k.v_max = std::sqrt(1.0 + r0.sup_grad_phi * r0.sup_grad_phi);
  k.c3 = std::pow(k.c2, -(alpha + 1.0)) / k.m2;
  k.c4 = k.v_max * std::pow(k.c1, -(alpha + 1.0)) / k.m1;
  return k;
}

CheckResult check_c0(const Trajectory& traj, double C) {
  require_rows(traj, 1, "check_c0");
  const double alpha = traj.params.alpha;
  const int n = traj.grid.n_dim();
  const double phi1 = std::log(traj.samples.front().u_min);
  const double phi2 = std::log(traj.samples.front().u_max);
  CheckResult r;
  r.name = "c0";
  r.tolerance = slack(traj, C);
  r.margin = std::numeric_limits<double>::infinity();
  // row 0 defines the bounds and sits on them exactly
  for (std::size_t k = traj.samples.size() > 1 ? 1 : 0; k < traj.samples.size(); ++k) {
    const Sample& row = traj.samples[k];
    const double lo = std::log(row.u_min) - log_model(row.t, alpha, n, phi1);
    const double hi = log_model(row.t, alpha, n, phi2) - std::log(row.u_max);
    const double m = std::min(lo, hi);
    if (m < r.margin || std::isnan(m)) {
      r.margin = m;
      r.worst_time = row.t;
    }
  }
  r.details = "log-radius sandwich from phi1 = " + num(phi1) + ", phi2 = " + num(phi2);
  return finish(r);
}

CheckResult check_phidot(const Trajectory& traj, double C) {
  require_rows(traj, 1, "check_phidot");
  const double n = traj.grid.n_dim();
  const Sample& r0 = traj.samples.front();
  const double lo = std::min(r0.phidot_theta_min, 1.0 / n);
  const double hi = std::max(r0.phidot_theta_max, 1.0 / n);
  CheckResult r;
  r.name = "phidot";
  r.tolerance = slack(traj, C);
  r.margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = traj.samples.size() > 1 ? 1 : 0; k < traj.samples.size(); ++k) {
    const Sample& row = traj.samples[k];
    const double m = n * std::min(row.phidot_theta_min - lo, hi - row.phidot_theta_max);
    if (m < r.margin || std::isnan(m)) {
      r.margin = m;
      r.worst_time = row.t;
    }
  }
  r.details = "band [" + num(lo) + ", " + num(hi) + "], margin in units of 1/n";
  return finish(r);
}

CheckResult check_gradient_monotone(const Trajectory& traj, double tau, double tau_step) {
  require_rows(traj, 1, "check_gradient_monotone");
  const double g0 = traj.samples.front().sup_grad_phi;
  CheckResult r;
  r.name = "gradient_monotone";
  r.tolerance = tau;
  r.margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    const double g = traj.samples[k].sup_grad_phi;
    const double prev = traj.samples[k - 1].sup_grad_phi;
    // the step test carries its own slack, folded in so that one tolerance applies
    const double m = std::min(g0 - g, prev - g + tau_step - tau);
    if (m < r.margin || std::isnan(m)) {
      r.margin = m;
      r.worst_time = traj.samples[k].t;
    }
  }
  if (traj.samples.size() == 1) r.margin = 0.0;
  r.details = "sup|D phi(0)| = " + num(g0) + ", step slack " + num(tau_step);
  return finish(r);
}

CheckResult check_H_theta(const Trajectory& traj, double C, double band_scale) {
  const DerivedConstants k = derive_constants(traj);
  const double centre = 0.5 * (k.c3 + k.c4);
  const double half = 0.5 * (k.c4 - k.c3) * band_scale;
  const double lo = centre - half;
  const double hi = centre + half;
  CheckResult r;
  r.name = "H_theta";
  r.tolerance = slack(traj, C);
  r.margin = std::numeric_limits<double>::infinity();
  for (const Sample& row : traj.samples) {
    const double m = std::min(row.H_theta_min / lo - 1.0, 1.0 - row.H_theta_max / hi);
    if (m < r.margin || std::isnan(m)) {
      r.margin = m;
      r.worst_time = row.t;
    }
  }
  r.details = "band [" + num(lo) + ", " + num(hi) + "] (c3 = " + num(k.c3) + ", c4 = " +
              num(k.c4) + ")";
  return finish(r);
}

double area_law_residual(const Trajectory& traj, double* worst_time) {
  const auto& rows = traj.samples;
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < rows.size(); ++k) {
    const double h1 = rows[k].t - rows[k - 1].t;
    const double h2v = rows[k + 1].t - rows[k].t;
    const double d = -h2v / (h1 * (h1 + h2v)) * rows[k - 1].area +
                     (h2v - h1) / (h1 * h2v) * rows[k].area +
                     h1 / (h2v * (h1 + h2v)) * rows[k + 1].area;
    const double ref = rows[k].integral_u_minus_alpha;
    const double res = std::abs(d - ref) / std::abs(ref);
    if (res > worst || std::isnan(res)) {
      worst = res;
      if (worst_time) *worst_time = rows[k].t;
    }
  }
  return worst;
}

CheckResult check_area_law(const Trajectory& traj, double C, double floor) {
  require_rows(traj, 3, "check_area_law");
  const auto& rows = traj.samples;
  const double n = traj.grid.n_dim();
  const double alpha = traj.params.alpha;
  double dt_rel = 0.0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double scale = n * std::pow(theta(rows[k].t, traj.ctx), alpha);
    dt_rel = std::max(dt_rel, (rows[k].t - rows[k - 1].t) / scale);
  }
  CheckResult r;
  r.name = "area_law";
  r.tolerance = std::max(floor, C * (dt_rel * dt_rel + h2(traj)));
  const double res = area_law_residual(traj, &r.worst_time);
  r.margin = -res;
  r.details = "max relative residual " + num(res) + " of f'(t) against the integral of u^-alpha";
  return finish(r);
}

CheckResult check_holder_diagnostic(const Trajectory& traj, const VerifyOptions& opts) {
  const CapGrid& grid = traj.grid;
  const double alpha = traj.params.alpha;
  const double n = grid.n_dim();
  const double beta = opts.holder_beta;
  const double radius = opts.holder_radius * grid.h_theta();
  const std::size_t nn = grid.size();

  std::vector<std::array<double, 3>> pos(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    const double s = grid.sin_theta(i);
    pos[i] = {s * std::cos(grid.psi(i)), s * std::sin(grid.psi(i)), grid.cos_theta(i)};
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> dist;
  for (std::size_t i = 0; i < nn; ++i) {
    for (std::size_t j = i + 1; j < nn; ++j) {
      if (std::abs(grid.ring(i) - grid.ring(j)) > opts.holder_radius + 1.0) continue;
      const double dx = pos[i][0] - pos[j][0];
      const double dy = pos[i][1] - pos[j][1];
      const double dz = pos[i][2] - pos[j][2];
      const double d = 2.0 * std::asin(0.5 * std::sqrt(dx * dx + dy * dy + dz * dz));
      if (d <= radius && d > 0.0) {
        pairs.emplace_back(i, j);
        dist.push_back(std::pow(d, beta));
      }
    }
  }

  // Fields |D u~|, d_s u~, H~ per snapshot.
  std::vector<std::array<std::vector<double>, 3>> fields;
  std::vector<double> svals;
  for (const Snapshot& snap : traj.snapshots) {
    const double th = theta(snap.t, traj.ctx);
    const ScalarField ut = rescaled_field(snap, traj.ctx);
    GeometryOptions go;
    go.alpha = alpha;
    go.enforce_mean_convexity = false;
    ScalarField u = snap.u;
    u.neumann = true;
    const GraphGeometry geo = graph_geometry(u, grid, go);
    std::array<std::vector<double>, 3> f;
    for (auto& v : f) v.resize(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      f[0][i] = ut[i] * std::sqrt(geo.dphi.norm2[i]);
      f[1][i] = std::pow(th, alpha - 1.0) * geo.speed[i] * geo.v[i] - ut[i] / n;
      f[2][i] = geo.mean_curv[i] * th;
    }
    fields.push_back(std::move(f));
    svals.push_back(snap.s);
  }

  std::vector<double> series;
  for (std::size_t k = 1; k < fields.size(); ++k) {
    const double ds = svals[k] - svals[k - 1];
    if (!(ds > 0.0)) continue;
    const double dsb = std::pow(ds, 0.5 * beta);
    double proxy = 0.0;
    for (int q = 0; q < 3; ++q) {
      const auto& f = fields[k][q];
      double spatial = 0.0;
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        spatial = std::max(spatial, std::abs(f[pairs[p].first] - f[pairs[p].second]) / dist[p]);
      }
      double temporal = 0.0;
      for (std::size_t i = 0; i < nn; ++i) {
        temporal = std::max(temporal, std::abs(f[i] - fields[k - 1][q][i]) / dsb);
      }
      proxy = std::max(proxy, spatial + temporal);
    }
    series.push_back(proxy);
  }

  CheckResult r;
  r.name = "holder";
  r.tolerance = 0.0;
  if (series.size() < 4) {
    r.margin = 0.0;
    r.details = "diagnostic skipped: fewer than 4 snapshot intervals";
    return finish(r);
  }
  const std::size_t quarter = series.size() / 4;
  const double first =
      std::accumulate(series.begin(), series.begin() + quarter, 0.0) / quarter;
  const double last = std::accumulate(series.end() - quarter, series.end(), 0.0) / quarter;
  const double bound = opts.holder_growth * first + opts.holder_floor;
  r.margin = (bound - last) / bound;
  r.worst_time = traj.snapshots.back().t;
  r.details = "beta = " + num(beta) + ", first-quarter mean " + num(first) +
              ", last-quarter mean " + num(last) + " over " + std::to_string(series.size()) +
              " intervals";
  return finish(r);
}

DecayFit fit_gradient_decay(const Trajectory& traj, double noise) {
  require_rows(traj, 1, "fit_gradient_decay");
  const auto& rows = traj.samples;
  DecayFit fit;
  const double g0 = rows.front().sup_grad_utilde;
  if (g0 == 0.0) {
    fit.degenerate = std::all_of(rows.begin(), rows.end(),
                                 [](const Sample& s) { return s.sup_grad_utilde == 0.0; });
    if (fit.degenerate) return fit;
  }
  const double floor = decay_floor(rows, noise);
  std::size_t end = 0;
  while (end < rows.size() && rows[end].sup_grad_utilde > floor) ++end;
  if (end < 3) return fit;
  const double s_mid = 0.5 * (rows.front().s + rows[end - 1].s);
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < end; ++k) {
    if (rows[k].s >= s_mid) {
      xs.push_back(rows[k].s);
      ys.push_back(std::log(rows[k].sup_grad_utilde));
    }
  }
  fit.points = xs.size();
  if (xs.size() < 3) return fit;
  const double m = static_cast<double>(xs.size());
  const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - xbar) * (xs[k] - xbar);
    sxy += (xs[k] - xbar) * (ys[k] - ybar);
    syy += (ys[k] - ybar) * (ys[k] - ybar);
  }
  if (!(sxx > 0.0)) return fit;
  const double slope = sxy / sxx;
  fit.lambda = -slope;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 0.0;
  fit.s_first = xs.front();
  fit.s_last = xs.back();
  return fit;
}

CheckResult check_gradient_decay(const Trajectory& traj, double burn_in, double r2_min,
                                 double noise) {
  const DecayFit fit = fit_gradient_decay(traj, noise);
  CheckResult r;
  r.name = "gradient_decay";
  r.tolerance = 0.0;
  if (fit.degenerate) {
    r.margin = 0.0;
    r.details = "degenerate: sup|D u~| identically zero";
    return finish(r);
  }
  if (fit.points < 3) {
    r.margin = -1.0;
    r.details = "too few resolvable samples for a decay fit";
    return finish(r);
  }
  const auto& rows = traj.samples;
  const double g0 = rows.front().sup_grad_utilde;
  const double floor = decay_floor(rows, noise);
  double envelope = std::numeric_limits<double>::infinity();
  for (const Sample& row : rows) {
    if (row.s < burn_in || row.sup_grad_utilde <= floor) continue;
    const double m = std::log(g0) - 0.5 * fit.lambda * row.s - std::log(row.sup_grad_utilde);
    if (m < envelope) {
      envelope = m;
      r.worst_time = row.t;
    }
  }
  r.margin = std::min({fit.lambda, fit.r2 - r2_min, envelope});
  r.details = "lambda_fit = " + num(fit.lambda) + ", R^2 = " + num(fit.r2) + " over s in [" +
              num(fit.s_first) + ", " + num(fit.s_last) + "] (" + std::to_string(fit.points) +
              " samples)";
  return finish(r);
}

RadiusEstimate estimate_radius(const Trajectory& traj) {
  require_rows(traj, 1, "estimate_radius");
  if (traj.snapshots.empty()) {
    throw Error(ErrorKind::invalid_argument, "estimate_radius: no snapshots");
  }
  const CapGrid& grid = traj.grid;
  const Snapshot& first = traj.snapshots.front();
  const Snapshot& last = traj.snapshots.back();
  const ScalarField ut = rescaled_field(last, traj.ctx);
  const double measure = integrate(std::vector<double>(grid.size(), 1.0), grid);
  RadiusEstimate e;
  e.r_inf = integrate(ut, grid) / measure;
  const auto [lo, hi] = std::minmax_element(ut.values.begin(), ut.values.end());
  e.spread = *hi - *lo;
  e.grad = traj.samples.back().sup_grad_utilde;
  const auto [u_lo, u_hi] = std::minmax_element(first.u.values.begin(), first.u.values.end());
  const double base = std::pow(traj.samples.front().area / measure, 1.0 / grid.n_dim());
  e.lower = base / *u_hi;
  e.upper = base / *u_lo;
  return e;
}

CheckResult check_radius(const Trajectory& traj, double C, double roundness,
                         double grad_threshold) {
  const RadiusEstimate e = estimate_radius(traj);
  CheckResult r;
  r.name = "radius";
  r.tolerance = slack(traj, C);
  r.worst_time = traj.snapshots.back().t;
  r.margin = std::min({(e.r_inf - e.lower) / e.r_inf, (e.upper - e.r_inf) / e.r_inf,
                       (roundness - e.spread) / roundness,
                       (grad_threshold - e.grad) / grad_threshold});
  r.details = "r_inf = " + num(e.r_inf) + " in [" + num(e.lower) + ", " + num(e.upper) +
              "], final spread " + num(e.spread) + ", final sup|D u~| " + num(e.grad);
  return finish(r);
}

EstimateReport build_report(std::vector<CheckResult> checks, const DerivedConstants& constants,
                            const Trajectory& traj, const std::string& name) {
  if (checks.empty()) throw Error(ErrorKind::nothing_verified, "nothing verified");
  EstimateReport rep;
  rep.name = name;
  rep.grid = traj.grid;
  rep.params = traj.params;
  rep.ctx = traj.ctx;
  rep.rescaled = traj.rescaled;
  rep.termination = traj.termination;
  rep.termination_message = traj.message;
  rep.constants = constants;
  rep.passed = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  rep.checks = std::move(checks);
  return rep;
}

EstimateReport verify_trajectory(const Trajectory& traj, const VerifyOptions& opts,
                                 const std::vector<std::string>& enabled, const std::string& name) {
  const std::vector<std::string>& names = enabled.empty() ? check_names() : enabled;
  for (const std::string& n : names) {
    if (std::find(check_names().begin(), check_names().end(), n) == check_names().end()) {
      throw Error(ErrorKind::config_value, "unknown check '" + n + "'");
    }
  }
  auto on = [&](const std::string& n) {
    return std::find(names.begin(), names.end(), n) != names.end();
  };
  std::vector<CheckResult> checks;
  // report order is fixed regardless of the order checks were requested in
  for (const std::string& n : check_names()) {
    if (!on(n)) continue;
    if (n == "c0") checks.push_back(check_c0(traj, opts.c0_C));
    if (n == "phidot") checks.push_back(check_phidot(traj, opts.phidot_C));
    if (n == "gradient_monotone") {
      checks.push_back(check_gradient_monotone(traj, opts.grad_tau, opts.grad_tau_step));
    }
    if (n == "H_theta") checks.push_back(check_H_theta(traj, opts.H_C, opts.H_band_scale));
    if (n == "area_law") checks.push_back(check_area_law(traj, opts.area_C, opts.area_floor));
    if (n == "evolution_identities") {
      checks.push_back(check_evolution_identities(traj, opts.identities));
    }
    if (n == "holder") checks.push_back(check_holder_diagnostic(traj, opts));
    if (n == "gradient_decay") {
      checks.push_back(
          check_gradient_decay(traj, opts.decay_burn_in, opts.decay_r2_min, opts.decay_noise));
    }
    if (n == "radius") {
      checks.push_back(check_radius(traj, opts.radius_C, opts.roundness, opts.radius_grad));
    }
  }
  DerivedConstants k = derive_constants(traj);
  const DecayFit fit = fit_gradient_decay(traj, opts.decay_noise);
  k.lambda_fit = fit.lambda;
  k.r2_fit = fit.r2;
  const RadiusEstimate e = estimate_radius(traj);
  k.r_inf = e.r_inf;
  k.radius_lower = e.lower;
  k.radius_upper = e.upper;
  return build_report(std::move(checks), k, traj, name);
}

}  // namespace icf
