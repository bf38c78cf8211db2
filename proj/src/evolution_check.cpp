// Time derivatives of g_ij, g^ij and nu along a recorded trajectory.
//
// Snapshots are stored in the graph parametrization X(x, t) = u(x, t) x, whose
// velocity u_t x differs from the normal velocity Phi nu by the tangential
// field tau^k X_k with tau^k = g^kl u_t u_l. Each identity therefore picks up
// a Lie derivative along tau:
//   d_t g_ij  - (L_tau g)_ij  = 2 Phi h_ij
//   d_t g^ij  - (L_tau g)^ij  = -2 Phi h^ij
//   d_t nu    - tau^k d_k nu  = -g^ij Phi_j X_i
// Everything is done in (theta, psi) coordinate components away from the pole.

#include <array>
#include <cmath>
#include <limits>

#include "icf/graph_geom.hpp"
#include "icf/rescale.hpp"
#include "icf/verifier.hpp"

namespace icf {

namespace {

using Vec3 = std::array<double, 3>;

struct Coord {
  double tt = 0.0;
  double tp = 0.0;
  double pp = 0.0;
};

// Coordinate components of the inverse (contravariant) frame tensor.
Coord raised_coord(const FrameSym& f, double s) { return {f.t11, f.t12 / s, f.t22 / (s * s)}; }
Coord lowered_coord(const FrameSym& f, double s) { return {f.t11, f.t12 * s, f.t22 * s * s}; }

// Largest frame component of a covariant / contravariant coordinate tensor.
double frame_norm_lower(const Coord& c, double s) {
  return std::max({std::abs(c.tt), std::abs(c.tp / s), std::abs(c.pp / (s * s))});
}
double frame_norm_upper(const Coord& c, double s) {
  return std::max({std::abs(c.tt), std::abs(c.tp * s), std::abs(c.pp * s * s)});
}

struct Basis {
  Vec3 radial;
  Vec3 e1;
  Vec3 e2;
};

Basis ambient_basis(const CapGrid& grid, std::size_t i) {
  const double st = grid.sin_theta(i), ct = grid.cos_theta(i);
  if (grid.mode() == GridMode::axisymmetric) {
    // meridian plane (z, rho)
    return {{ct, st, 0.0}, {-st, ct, 0.0}, {0.0, 0.0, 0.0}};
  }
  const double sp = std::sin(grid.psi(i)), cp = std::cos(grid.psi(i));
  return {{st * cp, st * sp, ct}, {ct * cp, ct * sp, -st}, {-sp, cp, 0.0}};
}

struct Level {
  GraphGeometry geo;
  std::vector<double> u;
  std::vector<Vec3> nu;
};

Level level(const Snapshot& snap, const CapGrid& grid, double alpha) {
  GeometryOptions go;
  go.alpha = alpha;
  go.enforce_mean_convexity = false;
  ScalarField u = snap.u;
  u.neumann = true;
  Level lv{graph_geometry(u, grid, go), snap.u.values, {}};
  lv.nu.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Basis b = ambient_basis(grid, i);
    const auto& n = lv.geo.normal[i];
    for (int a = 0; a < 3; ++a) lv.nu[i][a] = n[0] * b.radial[a] + n[1] * b.e1[a] + n[2] * b.e2[a];
  }
  return lv;
}

}  // namespace

CheckResult check_evolution_identities(const Trajectory& traj, const EvolutionOptions& opts) {
  CheckResult r;
  r.name = "evolution_identities";
  const auto& snaps = traj.snapshots;
  std::size_t mid = 0;
  for (std::size_t k = 1; k + 1 < snaps.size(); ++k) {
    if (snaps[k].t == opts.time) mid = k;
  }
  if (mid == 0) {
    r.passed = false;
    r.margin = -std::numeric_limits<double>::max();
    r.details = "no interior snapshot at t = " + std::to_string(opts.time);
    return r;
  }

  const CapGrid& grid = traj.grid;
  const double alpha = traj.params.alpha;
  const Level a = level(snaps[mid - 1], grid, alpha);
  const Level b = level(snaps[mid], grid, alpha);
  const Level c = level(snaps[mid + 1], grid, alpha);
  const double h1 = snaps[mid].t - snaps[mid - 1].t;
  const double h2 = snaps[mid + 1].t - snaps[mid].t;
  const double wa = -h2 / (h1 * (h1 + h2));
  const double wb = (h2 - h1) / (h1 * h2);
  const double wc = h1 / (h2 * (h1 + h2));
  auto ddt = [&](double fa, double fb, double fc) { return wa * fa + wb * fb + wc * fc; };

  const std::size_t nn = grid.size();
  const double k_phi = opts.phi_scale;

  // Middle-level coordinate fields and the tangential velocity.
  std::vector<double> g_tt(nn), g_tp(nn), g_pp(nn), gi_tt(nn), gi_tp(nn), gi_pp(nn);
  std::vector<double> tau_t(nn), tau_p(nn), speed(nn);
  std::array<std::vector<double>, 3> nu_c;
  for (auto& v : nu_c) v.resize(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    speed[i] = b.geo.speed[i];
    for (int q = 0; q < 3; ++q) nu_c[q][i] = b.nu[i][q];
    if (grid.is_pole(i)) continue;
    const double s = grid.sin_theta(i);
    const Coord g = lowered_coord(b.geo.metric.components[i], s);
    const Coord gi = raised_coord(b.geo.inv_metric.components[i], s);
    g_tt[i] = g.tt;
    g_tp[i] = g.tp;
    g_pp[i] = g.pp;
    gi_tt[i] = gi.tt;
    gi_tp[i] = gi.tp;
    gi_pp[i] = gi.pp;
    const double ut = ddt(a.u[i], b.u[i], c.u[i]);
    const FrameVec dphi = b.geo.dphi.lowered(grid, i);
    const double u1 = b.u[i] * dphi.e1;
    const double u2 = b.u[i] * dphi.e2;
    tau_t[i] = ut * (gi.tt * u1 + gi.tp * u2);
    tau_p[i] = ut * (gi.tp * u1 + gi.pp * u2);
  }

  double err_g = 0.0, err_gi = 0.0, err_nu = 0.0;
  double scale_g = 0.0, scale_gi = 0.0, scale_nu = 0.0;
  std::size_t worst = no_node;
  double worst_rel = -1.0;
  std::vector<double> res_g(nn), res_gi(nn), res_nu(nn);

  for (std::size_t i = 0; i < nn; ++i) {
    if (grid.is_pole(i)) continue;
    const double s = grid.sin_theta(i);
    auto dt_ = [&](const std::vector<double>& f) { return detail::d_theta(f, grid, i); };
    auto dp_ = [&](const std::vector<double>& f) { return detail::d_psi(f, grid, i); };
    const double T1 = tau_t[i], T2 = tau_p[i];
    const double dT1_t = dt_(tau_t), dT1_p = dp_(tau_t);
    const double dT2_t = dt_(tau_p), dT2_p = dp_(tau_p);

    // d_t g - L_tau g
    const Coord ga = lowered_coord(a.geo.metric.components[i], s);
    const Coord gc = lowered_coord(c.geo.metric.components[i], s);
    const Coord g{g_tt[i], g_tp[i], g_pp[i]};
    Coord lhs;
    lhs.tt = ddt(ga.tt, g.tt, gc.tt) -
             (T1 * dt_(g_tt) + T2 * dp_(g_tt) + 2.0 * (g.tt * dT1_t + g.tp * dT2_t));
    lhs.tp = ddt(ga.tp, g.tp, gc.tp) -
             (T1 * dt_(g_tp) + T2 * dp_(g_tp) + g.tt * dT1_p + g.tp * dT2_p + g.tp * dT1_t +
              g.pp * dT2_t);
    lhs.pp = ddt(ga.pp, g.pp, gc.pp) -
             (T1 * dt_(g_pp) + T2 * dp_(g_pp) + 2.0 * (g.tp * dT1_p + g.pp * dT2_p));
    const Coord h = lowered_coord(b.geo.second_ff.components[i], s);
    const double phi2 = 2.0 * k_phi * speed[i];
    const Coord rg{lhs.tt - phi2 * h.tt, lhs.tp - phi2 * h.tp, lhs.pp - phi2 * h.pp};
    res_g[i] = frame_norm_lower(rg, s);
    scale_g = std::max(scale_g, frame_norm_lower({phi2 * h.tt, phi2 * h.tp, phi2 * h.pp}, s));

    // d_t g^-1 - L_tau g^-1
    const Coord gia = raised_coord(a.geo.inv_metric.components[i], s);
    const Coord gic = raised_coord(c.geo.inv_metric.components[i], s);
    const Coord gi{gi_tt[i], gi_tp[i], gi_pp[i]};
    Coord lhi;
    lhi.tt = ddt(gia.tt, gi.tt, gic.tt) -
             (T1 * dt_(gi_tt) + T2 * dp_(gi_tt) - 2.0 * (gi.tt * dT1_t + gi.tp * dT1_p));
    lhi.tp = ddt(gia.tp, gi.tp, gic.tp) -
             (T1 * dt_(gi_tp) + T2 * dp_(gi_tp) - (gi.tt * dT2_t + gi.tp * dT2_p) -
              (gi.tp * dT1_t + gi.pp * dT1_p));
    lhi.pp = ddt(gia.pp, gi.pp, gic.pp) -
             (T1 * dt_(gi_pp) + T2 * dp_(gi_pp) - 2.0 * (gi.tp * dT2_t + gi.pp * dT2_p));
    // h^ij = g^ia h_ab g^bj
    const double m11 = gi.tt * h.tt + gi.tp * h.tp, m12 = gi.tt * h.tp + gi.tp * h.pp;
    const double m21 = gi.tp * h.tt + gi.pp * h.tp, m22 = gi.tp * h.tp + gi.pp * h.pp;
    const Coord hu{m11 * gi.tt + m12 * gi.tp, m11 * gi.tp + m12 * gi.pp,
                   m21 * gi.tp + m22 * gi.pp};
    const Coord rgi{lhi.tt + phi2 * hu.tt, lhi.tp + phi2 * hu.tp, lhi.pp + phi2 * hu.pp};
    res_gi[i] = frame_norm_upper(rgi, s);
    scale_gi = std::max(scale_gi, frame_norm_upper({phi2 * hu.tt, phi2 * hu.tp, phi2 * hu.pp}, s));

    // d_t nu - tau^k d_k nu + g^ij Phi_j X_i
    const Basis bs = ambient_basis(grid, i);
    const FrameVec dphi = b.geo.dphi.lowered(grid, i);
    const double u = b.u[i];
    Vec3 x_t, x_p;
    for (int q = 0; q < 3; ++q) {
      x_t[q] = u * dphi.e1 * bs.radial[q] + u * bs.e1[q];
      x_p[q] = u * dphi.e2 * bs.radial[q] + u * s * bs.e2[q];
    }
    const double f_t = k_phi * dt_(speed);
    const double f_p = k_phi * dp_(speed);
    const double grad_t = gi.tt * f_t + gi.tp * f_p;
    const double grad_p = gi.tp * f_t + gi.pp * f_p;
    double rn = 0.0;
    for (int q = 0; q < 3; ++q) {
      const double lhs_nu = ddt(a.nu[i][q], b.nu[i][q], c.nu[i][q]) -
                            (T1 * dt_(nu_c[q]) + T2 * dp_(nu_c[q]));
      rn = std::max(rn, std::abs(lhs_nu + grad_t * x_t[q] + grad_p * x_p[q]));
    }
    res_nu[i] = rn;
    scale_nu = std::max(scale_nu, k_phi * speed[i] / u);
  }

  for (std::size_t i = 0; i < nn; ++i) {
    if (grid.is_pole(i)) continue;
    const double eg = res_g[i] / scale_g;
    const double egi = res_gi[i] / scale_gi;
    const double en = res_nu[i] / scale_nu;
    err_g = std::max(err_g, eg);
    err_gi = std::max(err_gi, egi);
    err_nu = std::max(err_nu, en);
    const double e = std::max({eg, egi, en});
    if (e > worst_rel) {
      worst_rel = e;
      worst = i;
    }
  }

  const double T = grid.n_dim() * std::pow(theta(snaps[mid].t, traj.ctx), alpha);
  const double delta = std::max(h1, h2) / T;
  const double hh = grid.h_theta() * grid.h_theta();
  const double unit = delta * delta + hh;
  const double err = std::max({err_g, err_gi, err_nu});
  r.tolerance = opts.C * unit;
  r.margin = -err;
  r.passed = std::isfinite(err) && err <= r.tolerance;
  if (!std::isfinite(err)) r.margin = -std::numeric_limits<double>::max();
  r.worst_time = snaps[mid].t;
  r.worst_node = worst;
  auto fmt = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return std::string(buf);
  };
  r.details = "relative residuals g " + fmt(err_g) + ", g^-1 " + fmt(err_gi) + ", nu " +
              fmt(err_nu) + "; measured constant err/(delta^2 + h^2) = " + fmt(err / unit);
  return r;
}

}  // namespace icf
