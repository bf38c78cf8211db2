#pragma once

// Discrete differential geometry on a geodesic cap of the round unit sphere.
//
// Nodes sit on a polar chart (theta, psi) centred at the cap centre. Vector and
// tensor fields are stored by their components in the orthonormal frame
//   e1 = d/dtheta,  e2 = (1/sin theta) d/dpsi,
// so the round metric is the identity in storage. At the pole (theta = 0) the
// frame is the Cartesian pair of geodesic normal coordinates (x along psi = 0,
// y along psi = pi/2). Coordinate components are available via accessors.
//
// In axisymmetric mode a field depends on theta only and the cap lives in S^n
// for any n >= 2; e2 then stands for each of the n - 1 angular directions
// (angular_multiplicity()), all carrying the same tensor component, and the
// mixed component t12 is zero.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "icf/error.hpp"

namespace icf {

enum class GridMode { axisymmetric, full2d };

struct Resolution {
  int n_theta = 0;
  int n_psi = 0;
};

struct FrameVec {
  double e1 = 0.0;
  double e2 = 0.0;
};

struct FrameSym {
  double t11 = 0.0;
  double t12 = 0.0;
  double t22 = 0.0;
};

class CapGrid {
 public:
  int n_dim() const { return n_dim_; }
  double theta_max() const { return theta_max_; }
  GridMode mode() const { return mode_; }
  int n_theta() const { return n_theta_; }
  int n_psi() const { return n_psi_; }
  double h_theta() const { return h_theta_; }
  double h_psi() const { return h_psi_; }
  std::uint64_t id() const { return id_; }

  std::size_t size() const { return theta_.size(); }
  /// Number of angular directions represented by the e2 component.
  int angular_multiplicity() const { return mode_ == GridMode::axisymmetric ? n_dim_ - 1 : 1; }

  /// Node index of ring j, column k (full2d); ring 0 is the single pole node.
  std::size_t index(int j, int k = 0) const;
  int ring(std::size_t i) const { return ring_[i]; }
  int column(std::size_t i) const { return column_[i]; }
  bool is_pole(std::size_t i) const { return ring_[i] == 0; }
  bool is_boundary(std::size_t i) const { return ring_[i] == n_theta_ - 1; }

  double theta(std::size_t i) const { return theta_[i]; }
  double psi(std::size_t i) const { return psi_[i]; }
  double sin_theta(std::size_t i) const { return sin_[i]; }
  double cos_theta(std::size_t i) const { return cos_[i]; }
  /// Smallest node spacing around node i in geodesic length (CFL input).
  double spacing(std::size_t i) const { return spacing_[i]; }

  std::span<const double> weights() const { return weights_; }
  std::span<const std::size_t> boundary_index() const { return boundary_; }

  /// Exact round measure of the cap.
  double cap_area() const;

 private:
  friend CapGrid build_cap_grid(int, double, Resolution, GridMode);

  int n_dim_ = 2;
  double theta_max_ = 0.0;
  GridMode mode_ = GridMode::axisymmetric;
  int n_theta_ = 0;
  int n_psi_ = 0;
  double h_theta_ = 0.0;
  double h_psi_ = 0.0;
  std::uint64_t id_ = 0;
  std::vector<int> ring_;
  std::vector<int> column_;
  std::vector<double> theta_;
  std::vector<double> psi_;
  std::vector<double> sin_;
  std::vector<double> cos_;
  std::vector<double> spacing_;
  std::vector<double> weights_;
  std::vector<std::size_t> boundary_;
};

/// Throws invalid_argument on a non-convex cap (theta_max > pi/2), full2d
/// with n_dim != 2, or a degenerate resolution. full2d needs n_psi >= 8 and a
/// multiple of 4 (the pole stencil pairs opposite and orthogonal directions).
CapGrid build_cap_grid(int n_dim, double theta_max, Resolution resolution, GridMode mode);

struct ScalarField {
  std::uint64_t grid_id = 0;
  std::vector<double> values;
  /// The field satisfies d/dtheta f = 0 at theta_max; derivatives reflect it
  /// through a ghost node there. Otherwise one-sided stencils are used.
  bool neumann = false;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

ScalarField make_field(const CapGrid& grid, const std::function<double(double, double)>& f,
                       bool neumann);
ScalarField constant_field(const CapGrid& grid, double value, bool neumann = true);

struct CovectorField {
  std::uint64_t grid_id = 0;
  std::vector<FrameVec> components;
  std::vector<double> norm2;

  /// Coordinate components (f_theta, f_psi); frame components at the pole.
  FrameVec lowered(const CapGrid& grid, std::size_t i) const;
  /// Raised coordinate components (f^theta, f^psi) = sigma^{ij} f_j.
  FrameVec raised(const CapGrid& grid, std::size_t i) const;
};

struct SymTensorField {
  std::uint64_t grid_id = 0;
  std::vector<FrameSym> components;

  /// Coordinate components T_theta_theta, T_theta_psi, T_psi_psi.
  FrameSym coordinate(const CapGrid& grid, std::size_t i) const;
};

CovectorField gradient(const ScalarField& f, const CapGrid& grid);
/// Covariant Hessian with respect to the round metric.
SymTensorField hessian(const ScalarField& f, const CapGrid& grid);
/// Fixed-order weighted sum against the round measure.
double integrate(const ScalarField& f, const CapGrid& grid);
double integrate(std::span<const double> values, const CapGrid& grid);

/// sigma^{ij} T_ij with angular multiplicity.
double trace(const FrameSym& t, int multiplicity);
/// Determinant of the n x n frame matrix.
double determinant(const FrameSym& t, int multiplicity);

void require_same_grid(std::uint64_t field_grid, const CapGrid& grid);
void require_finite(std::span<const double> values, const char* what);

namespace detail {

/// First and second covariant derivatives at a node in frame components.
struct Jet {
  FrameVec grad;
  FrameSym hess;
};

Jet axisym_jet(const double* f, const CapGrid& grid, int j, bool neumann);
Jet ring_jet(const double* f, const CapGrid& grid, int j, int k, bool neumann);
/// Pole derivatives in the frame rotated to direction psi_k.
Jet pole_direction_jet(const double* f, const CapGrid& grid, int k);
/// Pole derivatives in the pole's Cartesian frame, averaged over all ring
/// directions.
Jet pole_jet(const double* f, const CapGrid& grid);
Jet node_jet(const double* f, const CapGrid& grid, std::size_t i, bool neumann);

/// Derivative along theta of an arbitrary node field (no boundary condition):
/// centred in the interior, one-sided second order at the first ring and at
/// theta_max. Pole entries are not used.
double d_theta(std::span<const double> f, const CapGrid& grid, std::size_t i);
/// Periodic centred derivative along psi (full2d only).
double d_psi(std::span<const double> f, const CapGrid& grid, std::size_t i);

/// Deterministic, permutation-invariant sum (sorted by value first).
double sorted_sum(std::vector<double>& values);

}  // namespace detail

}  // namespace icf
