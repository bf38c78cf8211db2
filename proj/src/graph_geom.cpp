#include "icf/graph_geom.hpp"

#include <cmath>
#include <string>

namespace icf {

void require_positive(const ScalarField& u) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) {
      throw Error(ErrorKind::not_star_shaped,
                  "not star-shaped: u <= 0 at node " + std::to_string(i), i, u[i]);
    }
  }
}

GraphGeometry graph_geometry(const ScalarField& u, const CapGrid& grid, double alpha) {
  GeometryOptions opts;
  opts.alpha = alpha;
  return graph_geometry(u, grid, opts);
}

GraphGeometry graph_geometry(const ScalarField& u, const CapGrid& grid, GeometryOptions opts) {
  require_same_grid(u.grid_id, grid);
  require_finite(u.values, "graph_geometry input");
  require_positive(u);

  const std::size_t n_nodes = grid.size();
  const int m = grid.angular_multiplicity();
  ScalarField phi = u;
  for (double& x : phi.values) x = std::log(x);

  GraphGeometry geo;
  auto scalar = [&] {
    ScalarField s;
    s.grid_id = grid.id();
    s.neumann = u.neumann;
    s.values.resize(n_nodes);
    return s;
  };
  auto tensor = [&] {
    SymTensorField t;
    t.grid_id = grid.id();
    t.components.resize(n_nodes);
    return t;
  };
  geo.v = scalar();
  geo.mean_curv = scalar();
  geo.support = scalar();
  geo.speed = scalar();
  geo.psi = scalar();
  geo.metric = tensor();
  geo.inv_metric = tensor();
  geo.second_ff = tensor();
  geo.shape.resize(n_nodes);
  geo.normal.resize(n_nodes);
  geo.dphi.grid_id = grid.id();
  geo.dphi.components.resize(n_nodes);
  geo.dphi.norm2.resize(n_nodes);

  for (std::size_t i = 0; i < n_nodes; ++i) {
    const detail::Jet jet = detail::node_jet(phi.values.data(), grid, i, phi.neumann);
    const double uu = u[i];
    const double p1 = jet.grad.e1;
    const double p2 = jet.grad.e2;
    const double grad2 = p1 * p1 + p2 * p2;
    const double v = std::sqrt(1.0 + grad2);

    // u_i = u phi_i, u_ij = u (phi_ij + phi_i phi_j)
    const double u1 = uu * p1;
    const double u2 = uu * p2;
    const double u11 = uu * (jet.hess.t11 + p1 * p1);
    const double u12 = uu * (jet.hess.t12 + p1 * p2);
    const double u22 = uu * (jet.hess.t22 + p2 * p2);

    const FrameSym g{uu * uu + u1 * u1, u1 * u2, uu * uu + u2 * u2};
    const double k = 1.0 / (uu * uu * v * v);
    const double inv_u2 = 1.0 / (uu * uu);
    const FrameSym gi{inv_u2 * (1.0 - k * u1 * u1), -inv_u2 * k * u1 * u2,
                      inv_u2 * (1.0 - k * u2 * u2)};
    const FrameSym h{(-u11 + uu + 2.0 * u1 * u1 / uu) / v, (-u12 + 2.0 * u1 * u2 / uu) / v,
                     (-u22 + uu + 2.0 * u2 * u2 / uu) / v};
    // h^i_j = g^{ik} h_kj
    FrameMixed sh;
    sh.m11 = gi.t11 * h.t11 + gi.t12 * h.t12;
    sh.m12 = gi.t11 * h.t12 + gi.t12 * h.t22;
    sh.m21 = gi.t12 * h.t11 + gi.t22 * h.t12;
    sh.m22 = gi.t12 * h.t12 + gi.t22 * h.t22;
    const double H = sh.m11 + m * sh.m22;

    if (opts.enforce_mean_convexity && !(H > opts.eps_mc)) {
      throw Error(ErrorKind::mean_convexity_lost,
                  "mean convexity lost at node " + std::to_string(i) + " (H = " +
                      std::to_string(H) + ")",
                  i, H);
    }

    geo.v[i] = v;
    geo.metric.components[i] = g;
    geo.inv_metric.components[i] = gi;
    geo.second_ff.components[i] = h;
    geo.shape[i] = sh;
    geo.mean_curv[i] = H;
    geo.normal[i] = {1.0 / v, -p1 / v, -p2 / v};
    geo.support[i] = uu / v;
    geo.speed[i] = 1.0 / (std::pow(uu, opts.alpha) * H);
    geo.psi[i] = geo.speed[i] / geo.support[i];
    geo.dphi.components[i] = jet.grad;
    geo.dphi.norm2[i] = grad2;
  }
  return geo;
}

double graph_area(const ScalarField& u, const CapGrid& grid) {
  require_same_grid(u.grid_id, grid);
  require_positive(u);
  ScalarField phi = u;
  for (double& x : phi.values) x = std::log(x);
  std::vector<double> density(grid.size());
  const double n = grid.n_dim();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const FrameVec g = detail::node_jet(phi.values.data(), grid, i, phi.neumann).grad;
    density[i] = std::pow(u[i], n) * std::sqrt(1.0 + g.e1 * g.e1 + g.e2 * g.e2);
  }
  return integrate(density, grid);
}

}  // namespace icf
