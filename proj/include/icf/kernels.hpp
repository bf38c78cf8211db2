#pragma once

// Node-parallel evaluation of the log-radius speed
//   Q = e^{-alpha phi} (1 + |D phi|^2) / (n - (sigma^{ij} - phi^i phi^j / v^2) phi_ij) - offset
// together with the largest eigenvalue of dQ/dphi_ij used for the step limit.
// Neumann reflection is always applied at theta_max.
//
// rhs_serial is the reference; rhs_parallel is the OpenMP version and must
// agree bit-for-bit (every node is computed independently, the pole value is
// a permutation-invariant sum).

#include <cstddef>
#include <span>

#include "icf/sphere_geom.hpp"

namespace icf::kernels {

struct RhsArgs {
  double alpha = 1.0;
  /// Subtracted from Q (1/n for the rescaled equation, 0 otherwise).
  double offset = 0.0;
  /// Mean-convexity floor on H.
  double eps_mc = 1e-8;
};

struct RhsStatus {
  /// Smallest node index where H <= eps_mc (no_node when none).
  std::size_t bad_node = no_node;
  double bad_denominator = 0.0;
  double bad_mean_curvature = 0.0;
  bool ok() const { return bad_node == no_node; }
};

/// `rate` (optional, may be empty) receives per-node e^{-alpha phi} v^2 / denom^2.
RhsStatus rhs_serial(const CapGrid& grid, std::span<const double> phi, const RhsArgs& args,
                     std::span<double> out, std::span<double> rate = {});
RhsStatus rhs_parallel(const CapGrid& grid, std::span<const double> phi, const RhsArgs& args,
                       std::span<double> out, std::span<double> rate = {});

/// Minimum over nodes of spacing^2 / (2 n rate); +inf if all rates vanish.
double min_step_ratio(const CapGrid& grid, std::span<const double> rate);

}  // namespace icf::kernels
