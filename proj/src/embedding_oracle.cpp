#include <array>
#include <cmath>

#include "icf/graph_geom.hpp"

namespace icf {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

struct Diff {
  Vec3 d1;
  Vec3 d2;
};

// First/second derivative of a sampled curve at index j of 0..n-1, with
// `at(q)` valid for q in [-1, n] when a ghost exists, else one-sided at n-1.
template <class At>
Diff curve_diff(At&& at, int j, int n, double h, bool ghost_above) {
  if (j < n - 1 || ghost_above) {
    const Vec3 a = at(j - 1), b = at(j), c = at(j + 1);
    return {(1.0 / (2.0 * h)) * (c - a), (1.0 / (h * h)) * (c - 2.0 * b + a)};
  }
  const Vec3 f0 = at(n - 1), f1 = at(n - 2), f2 = at(n - 3);
  Diff d;
  d.d1 = (1.0 / (2.0 * h)) * (3.0 * f0 - 4.0 * f1 + f2);
  if (n >= 4) {
    const Vec3 f3 = at(n - 4);
    d.d2 = (1.0 / (h * h)) * (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3);
  } else {
    d.d2 = (1.0 / (h * h)) * (f0 - 2.0 * f1 + f2);
  }
  return d;
}

OracleGeometry allocate(const CapGrid& grid) {
  OracleGeometry o;
  o.metric.grid_id = grid.id();
  o.metric.components.resize(grid.size());
  o.second_ff.grid_id = grid.id();
  o.second_ff.components.resize(grid.size());
  o.mean_curv.grid_id = grid.id();
  o.mean_curv.values.resize(grid.size());
  o.normal.resize(grid.size());
  o.radial_component.resize(grid.size());
  return o;
}

// Surface of revolution: profile curve P(theta) = u (cos theta, sin theta) in
// the meridian plane (z, rho).
OracleGeometry axisym_oracle(const ScalarField& u, const CapGrid& grid) {
  OracleGeometry o = allocate(grid);
  const int n = grid.n_theta();
  const double h = grid.h_theta();
  const int m = grid.angular_multiplicity();
  auto point = [&](int q) -> Vec3 {
    double r;
    if (q < 0) {
      r = u[static_cast<std::size_t>(-q)];
    } else if (q > n - 1) {
      r = u[static_cast<std::size_t>(2 * (n - 1) - q)];
    } else {
      r = u[static_cast<std::size_t>(q)];
    }
    const double th = q * h;
    return {r * std::cos(th), r * std::sin(th), 0.0};
  };

  for (int j = 0; j < n; ++j) {
    const Diff d = curve_diff(point, j, n, h, u.neumann);
    const double th = j * h;
    const Vec3 radial{std::cos(th), std::sin(th), 0.0};
    const double len = std::sqrt(dot(d.d1, d.d1));
    Vec3 nu{d.d1[1] / len, -d.d1[0] / len, 0.0};
    if (dot(nu, radial) < 0.0) nu = -1.0 * nu;

    const double g11 = dot(d.d1, d.d1);
    const double h11 = -dot(d.d2, nu);
    double g22 = g11;
    double h22 = h11;
    if (j > 0) {
      const Vec3 p = point(j);
      const double rho = p[1];
      const double s = std::sin(th);
      g22 = rho * rho / (s * s);
      h22 = rho * nu[1] / (s * s);
    }
    const std::size_t i = static_cast<std::size_t>(j);
    o.metric.components[i] = {g11, 0.0, g22};
    o.second_ff.components[i] = {h11, 0.0, h22};
    o.mean_curv[i] = h11 / g11 + m * h22 / g22;
    o.normal[i] = nu;
    o.radial_component[i] = dot(nu, radial);
  }
  return o;
}

Vec3 direction(double th, double ps) {
  return {std::sin(th) * std::cos(ps), std::sin(th) * std::sin(ps), std::cos(th)};
}

void finish_node(OracleGeometry& o, std::size_t i, const Vec3& x1, const Vec3& x2,
                 const Vec3& x11, const Vec3& x12, const Vec3& x22, const Vec3& radial,
                 double scale2) {
  Vec3 nu = cross(x1, x2);
  nu = (1.0 / std::sqrt(dot(nu, nu))) * nu;
  if (dot(nu, radial) < 0.0) nu = -1.0 * nu;
  const double g11 = dot(x1, x1), g12 = dot(x1, x2), g22 = dot(x2, x2);
  const double h11 = -dot(x11, nu), h12 = -dot(x12, nu), h22 = -dot(x22, nu);
  const double det = g11 * g22 - g12 * g12;
  o.mean_curv[i] = (g22 * h11 - 2.0 * g12 * h12 + g11 * h22) / det;
  // coordinate (theta, psi) -> frame: psi components scale by 1/sin theta
  const double s = std::sqrt(scale2);
  o.metric.components[i] = {g11, g12 / s, g22 / scale2};
  o.second_ff.components[i] = {h11, h12 / s, h22 / scale2};
  o.normal[i] = nu;
  o.radial_component[i] = dot(nu, radial);
}

OracleGeometry full2d_oracle(const ScalarField& u, const CapGrid& grid) {
  OracleGeometry o = allocate(grid);
  const int n = grid.n_theta();
  const int np = grid.n_psi();
  const double h = grid.h_theta();
  const double hp = grid.h_psi();

  // Ambient point of ring q, column k; q = n is the Neumann ghost ring.
  auto point = [&](int q, int k) -> Vec3 {
    const int src = q > n - 1 ? 2 * (n - 1) - q : q;
    const double r = u[grid.index(src, k)];
    return r * direction(q * h, ((k % np + np) % np) * hp);
  };
  auto x_psi = [&](int q, int k) -> Vec3 {
    if (q == 0) return {0.0, 0.0, 0.0};
    return (1.0 / (2.0 * hp)) * (point(q, k + 1) - point(q, k - 1));
  };

  for (int j = 1; j < n; ++j) {
    for (int k = 0; k < np; ++k) {
      const std::size_t i = grid.index(j, k);
      const Diff dt = curve_diff([&](int q) { return point(q, k); }, j, n, h, u.neumann);
      const Vec3 xp = x_psi(j, k);
      const Vec3 xpp = (1.0 / (hp * hp)) * (point(j, k + 1) - 2.0 * point(j, k) + point(j, k - 1));
      const Vec3 xtp = curve_diff([&](int q) { return x_psi(q, k); }, j, n, h, u.neumann).d1;
      const double s = grid.sin_theta(i);
      finish_node(o, i, dt.d1, xp, dt.d2, xtp, xpp, direction(j * h, k * hp), s * s);
    }
  }

  // Pole: Cartesian geodesic normal chart, derivatives of each ambient
  // component from the ring-averaged directional stencil.
  std::array<std::vector<double>, 3> comp;
  for (auto& c : comp) c.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 p = u[i] * direction(grid.theta(i), grid.psi(i));
    for (int a = 0; a < 3; ++a) comp[a][i] = p[a];
  }
  Vec3 x1, x2, x11, x12, x22;
  for (int a = 0; a < 3; ++a) {
    const detail::Jet jet = detail::pole_jet(comp[a].data(), grid);
    x1[a] = jet.grad.e1;
    x2[a] = jet.grad.e2;
    x11[a] = jet.hess.t11;
    x12[a] = jet.hess.t12;
    x22[a] = jet.hess.t22;
  }
  finish_node(o, 0, x1, x2, x11, x12, x22, {0.0, 0.0, 1.0}, 1.0);
  return o;
}

}  // namespace

OracleGeometry embedding_oracle(const ScalarField& u, const CapGrid& grid) {
  require_same_grid(u.grid_id, grid);
  require_finite(u.values, "embedding_oracle input");
  require_positive(u);
  return grid.mode() == GridMode::axisymmetric ? axisym_oracle(u, grid) : full2d_oracle(u, grid);
}

double oracle_area(const OracleGeometry& oracle, const CapGrid& grid) {
  require_same_grid(oracle.metric.grid_id, grid);
  std::vector<double> density(grid.size());
  const int m = grid.angular_multiplicity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    density[i] = std::sqrt(determinant(oracle.metric.components[i], m));
  }
  return integrate(density, grid);
}

}  // namespace icf
