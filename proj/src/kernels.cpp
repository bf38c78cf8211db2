#include "icf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace icf::kernels {

namespace {

struct NodeValue {
  double q = 0.0;
  double rate = 0.0;
  double denom = 0.0;
  double mean_curv = 0.0;
  bool bad = false;
};

NodeValue evaluate_jet(const detail::Jet& jet, double phi, int n_dim, int m, const RhsArgs& args) {
  const double p1 = jet.grad.e1;
  const double p2 = jet.grad.e2;
  const FrameSym& t = jet.hess;
  const double v2 = 1.0 + p1 * p1 + p2 * p2;
  const double tilt = p1 * p1 * t.t11 + 2.0 * p1 * p2 * t.t12 + p2 * p2 * t.t22;
  const double denom = n_dim - (trace(t, m) - tilt / v2);
  const double decay = std::exp(-args.alpha * phi);
  const double uv = std::exp(phi) * std::sqrt(v2);

  NodeValue out;
  out.denom = denom;
  out.mean_curv = denom / uv;
  if (!(out.mean_curv > args.eps_mc)) {
    out.bad = true;
    return out;
  }
  out.q = decay * v2 / denom - args.offset;
  out.rate = decay * v2 / (denom * denom);
  return out;
}

NodeValue evaluate_pole(const CapGrid& grid, const double* phi, const RhsArgs& args) {
  const int np = grid.n_psi();
  std::vector<double> qs(static_cast<std::size_t>(np));
  std::vector<double> rates(static_cast<std::size_t>(np));
  NodeValue worst;
  worst.mean_curv = std::numeric_limits<double>::infinity();
  for (int k = 0; k < np; ++k) {
    const NodeValue d =
        evaluate_jet(detail::pole_direction_jet(phi, grid, k), phi[0], grid.n_dim(), 1, args);
    if (d.mean_curv < worst.mean_curv) {
      worst.mean_curv = d.mean_curv;
      worst.denom = d.denom;
    }
    if (d.bad) worst.bad = true;
    qs[static_cast<std::size_t>(k)] = d.q;
    rates[static_cast<std::size_t>(k)] = d.rate;
  }
  if (worst.bad) return worst;
  NodeValue out;
  out.q = detail::sorted_sum(qs) / np;
  out.rate = detail::sorted_sum(rates) / np;
  out.denom = worst.denom;
  out.mean_curv = worst.mean_curv;
  return out;
}

NodeValue evaluate_node(const CapGrid& grid, const double* phi, std::size_t i,
                        const RhsArgs& args) {
  if (grid.mode() == GridMode::full2d && grid.is_pole(i)) return evaluate_pole(grid, phi, args);
  return evaluate_jet(detail::node_jet(phi, grid, i, true), phi[i], grid.n_dim(),
                      grid.angular_multiplicity(), args);
}

void check_sizes(const CapGrid& grid, std::span<const double> phi, std::span<double> out,
                 std::span<double> rate) {
  if (phi.size() != grid.size() || out.size() != grid.size() ||
      (!rate.empty() && rate.size() != grid.size())) {
    throw Error(ErrorKind::grid_mismatch, "kernel buffers do not match grid");
  }
}

RhsStatus status_at(const CapGrid& grid, const double* phi, std::size_t i, const RhsArgs& args) {
  const NodeValue v = evaluate_node(grid, phi, i, args);
  RhsStatus st;
  st.bad_node = i;
  st.bad_denominator = v.denom;
  st.bad_mean_curvature = v.mean_curv;
  return st;
}

}  // namespace

RhsStatus rhs_serial(const CapGrid& grid, std::span<const double> phi, const RhsArgs& args,
                     std::span<double> out, std::span<double> rate) {
  check_sizes(grid, phi, out, rate);
  const double* p = phi.data();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const NodeValue v = evaluate_node(grid, p, i, args);
    if (v.bad) return status_at(grid, p, i, args);
    out[i] = v.q;
    if (!rate.empty()) rate[i] = v.rate;
  }
  return {};
}

RhsStatus rhs_parallel(const CapGrid& grid, std::span<const double> phi, const RhsArgs& args,
                       std::span<double> out, std::span<double> rate) {
  check_sizes(grid, phi, out, rate);
  const double* p = phi.data();
  const long long n = static_cast<long long>(grid.size());
  const bool want_rate = !rate.empty();
  std::size_t bad = no_node;
#pragma omp parallel for schedule(static) reduction(min : bad) if (n > 512)
  for (long long ii = 0; ii < n; ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    const NodeValue v = evaluate_node(grid, p, i, args);
    if (v.bad) {
      bad = std::min(bad, i);
      continue;
    }
    out[i] = v.q;
    if (want_rate) rate[i] = v.rate;
  }
  if (bad != no_node) return status_at(grid, p, bad, args);
  return {};
}

double min_step_ratio(const CapGrid& grid, std::span<const double> rate) {
  double best = std::numeric_limits<double>::infinity();
  const double two_n = 2.0 * grid.n_dim();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (rate[i] > 0.0) {
      const double sp = grid.spacing(i);
      best = std::min(best, sp * sp / (two_n * rate[i]));
    }
  }
  return best;
}

}  // namespace icf::kernels
