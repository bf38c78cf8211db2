#pragma once

// Geometry of the radial graph M = { u(x) x : x in cap } over a geodesic cap.
// All tensors are in the orthonormal frame of sphere_geom.hpp; the ambient
// normal is given in the orthonormal frame (d_r, e1/u, e2/u) at the point.

#include <array>
#include <vector>

#include "icf/sphere_geom.hpp"

namespace icf {

/// Mixed tensor h^i_j in frame components (row i, column j).
struct FrameMixed {
  double m11 = 0.0;
  double m12 = 0.0;
  double m21 = 0.0;
  double m22 = 0.0;
};

struct GraphGeometry {
  ScalarField v;
  SymTensorField metric;
  SymTensorField inv_metric;
  SymTensorField second_ff;
  std::vector<FrameMixed> shape;
  ScalarField mean_curv;
  /// (radial, e1, e2) components of the outward unit normal.
  std::vector<std::array<double, 3>> normal;
  ScalarField support;
  ScalarField speed;
  ScalarField psi;
  /// D log u, kept for callers that need the tilt direction.
  CovectorField dphi;
};

struct GeometryOptions {
  double alpha = 0.0;
  double eps_mc = 1e-8;
  /// When false, mean convexity is not enforced (diagnostics of bad data).
  bool enforce_mean_convexity = true;
};

/// Closed-form graph geometry. Throws not_star_shaped when u <= 0 and
/// mean_convexity_lost when H <= eps_mc at some node.
GraphGeometry graph_geometry(const ScalarField& u, const CapGrid& grid, GeometryOptions opts = {});
GraphGeometry graph_geometry(const ScalarField& u, const CapGrid& grid, double alpha);

/// Area of the graph, \int u^n v dsigma.
double graph_area(const ScalarField& u, const CapGrid& grid);

/// Geometry computed from finite differences of the embedding in ambient
/// Cartesian coordinates. Shares no curvature algebra with graph_geometry.
struct OracleGeometry {
  SymTensorField metric;
  SymTensorField second_ff;
  ScalarField mean_curv;
  /// Outward normal in ambient Cartesian coordinates. Axisymmetric mode uses
  /// the meridian plane (z along the cap axis, rho away from it), third entry 0.
  std::vector<std::array<double, 3>> normal;
  /// Radial component <nu, x/|x|> of the normal.
  std::vector<double> radial_component;
};

OracleGeometry embedding_oracle(const ScalarField& u, const CapGrid& grid);

/// Surface area as the quadrature of the oracle's induced volume element.
double oracle_area(const OracleGeometry& oracle, const CapGrid& grid);

void require_positive(const ScalarField& u);

}  // namespace icf
