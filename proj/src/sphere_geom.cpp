#include "icf/sphere_geom.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace icf {

namespace {

std::atomic<std::uint64_t> next_grid_id{1};

// Gauss-Legendre nodes/weights on [-1, 1], 8 points.
constexpr std::array<double, 8> gl_x = {-0.9602898564975363, -0.7966664774136267,
                                        -0.5255324099163290, -0.1834346424956498,
                                        0.1834346424956498,  0.5255324099163290,
                                        0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> gl_w = {0.1012285362903763, 0.2223810344533745,
                                        0.3137066238953715, 0.3626837833783620,
                                        0.3626837833783620, 0.3137066238953715,
                                        0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss_legendre(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t q = 0; q < gl_x.size(); ++q) sum += gl_w[q] * f(mid + half * gl_x[q]);
  return sum * half;
}

// Measure of the unit sphere S^{m}.
double sphere_measure(int m) {
  const double d = m + 1;
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

// \int_0^theta sin^m
double sin_power_integral(int m, double theta) {
  if (m == 0) return theta;
  if (m == 1) return 1.0 - std::cos(theta);
  return -std::pow(std::sin(theta), m - 1) * std::cos(theta) / m +
         (m - 1.0) / m * sin_power_integral(m - 2, theta);
}

// Integral of the piecewise-linear hat at theta_j against sin^{m}.
double hat_weight(int j, int n_theta, double h, int m) {
  auto density = [m](double th) { return std::pow(std::sin(th), m); };
  const double tj = j * h;
  double w = 0.0;
  if (j > 0) {
    const double a = tj - h;
    w += gauss_legendre([&](double th) { return (th - a) / h * density(th); }, a, tj);
  }
  if (j < n_theta - 1) {
    const double b = tj + h;
    w += gauss_legendre([&](double th) { return (b - th) / h * density(th); }, tj, b);
  }
  return w;
}

struct OneSided {
  double d1;
  double d2;
};

// Backward second-order differences at the last entry of a column sampled by
// `at(j)` for j = 0..n-1.
template <class At>
OneSided backward_differences(At&& at, int n, double h) {
  const double f0 = at(n - 1);
  const double f1 = at(n - 2);
  const double f2 = at(n - 3);
  OneSided out{};
  out.d1 = (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h);
  if (n >= 4) {
    const double f3 = at(n - 4);
    out.d2 = (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h);
  } else {
    out.d2 = (f0 - 2.0 * f1 + f2) / (h * h);
  }
  return out;
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::grid_mismatch: return "grid_mismatch";
    case ErrorKind::non_finite: return "non_finite";
    case ErrorKind::not_star_shaped: return "not_star_shaped";
    case ErrorKind::mean_convexity_lost: return "mean_convexity_lost";
    case ErrorKind::blowup_detected: return "blowup_detected";
    case ErrorKind::initial_not_mean_convex: return "initial_not_mean_convex";
    case ErrorKind::eps_too_large: return "eps_too_large";
    case ErrorKind::config_syntax: return "config_syntax";
    case ErrorKind::config_value: return "config_value";
    case ErrorKind::io: return "io";
    case ErrorKind::nothing_verified: return "nothing_verified";
  }
  return "unknown";
}

std::size_t CapGrid::index(int j, int k) const {
  if (mode_ == GridMode::axisymmetric || j == 0) return static_cast<std::size_t>(j);
  const int kk = ((k % n_psi_) + n_psi_) % n_psi_;
  return 1 + static_cast<std::size_t>(j - 1) * n_psi_ + kk;
}

double CapGrid::cap_area() const {
  if (mode_ == GridMode::full2d) return 2.0 * std::numbers::pi * (1.0 - std::cos(theta_max_));
  return sphere_measure(n_dim_ - 1) * sin_power_integral(n_dim_ - 1, theta_max_);
}

CapGrid build_cap_grid(int n_dim, double theta_max, Resolution resolution, GridMode mode) {
  if (n_dim < 2) throw Error(ErrorKind::invalid_argument, "n_dim must be >= 2");
  if (!(theta_max > 0.0)) throw Error(ErrorKind::invalid_argument, "theta_max must be positive");
  if (theta_max > 0.5 * std::numbers::pi * (1.0 + 1e-14)) {
    throw Error(ErrorKind::invalid_argument,
                "cone not convex: theta_max must not exceed pi/2", no_node, theta_max);
  }
  if (resolution.n_theta < 3) {
    throw Error(ErrorKind::invalid_argument, "degenerate resolution: n_theta must be >= 3");
  }
  if (mode == GridMode::full2d) {
    if (n_dim != 2) throw Error(ErrorKind::invalid_argument, "full2d mode requires n_dim = 2");
    if (resolution.n_psi < 8 || resolution.n_psi % 4 != 0) {
      throw Error(ErrorKind::invalid_argument,
                  "degenerate resolution: n_psi must be >= 8 and a multiple of 4");
    }
  }

  CapGrid g;
  g.n_dim_ = n_dim;
  g.theta_max_ = theta_max;
  g.mode_ = mode;
  g.n_theta_ = resolution.n_theta;
  g.n_psi_ = mode == GridMode::full2d ? resolution.n_psi : 0;
  g.h_theta_ = theta_max / (resolution.n_theta - 1);
  g.h_psi_ = mode == GridMode::full2d ? 2.0 * std::numbers::pi / g.n_psi_ : 0.0;
  g.id_ = next_grid_id.fetch_add(1);

  const int nt = g.n_theta_;
  const double h = g.h_theta_;
  std::vector<double> ring_weight(nt);
  const int m = mode == GridMode::full2d ? 1 : n_dim - 1;
  for (int j = 0; j < nt; ++j) ring_weight[j] = hat_weight(j, nt, h, m);

  auto push = [&](int j, int k, double th, double ps, double w) {
    g.ring_.push_back(j);
    g.column_.push_back(k);
    g.theta_.push_back(th);
    g.psi_.push_back(ps);
    g.sin_.push_back(std::sin(th));
    g.cos_.push_back(std::cos(th));
    g.weights_.push_back(w);
    double sp = h;
    if (mode == GridMode::full2d && j > 0) sp = std::min(h, std::sin(th) * g.h_psi_);
    g.spacing_.push_back(sp);
    if (j == nt - 1) g.boundary_.push_back(g.theta_.size() - 1);
  };

  if (mode == GridMode::axisymmetric) {
    const double shell = sphere_measure(n_dim - 1);
    for (int j = 0; j < nt; ++j) push(j, 0, j * h, 0.0, shell * ring_weight[j]);
  } else {
    push(0, 0, 0.0, 0.0, 2.0 * std::numbers::pi * ring_weight[0]);
    for (int j = 1; j < nt; ++j) {
      for (int k = 0; k < g.n_psi_; ++k) {
        push(j, k, j * h, k * g.h_psi_, g.h_psi_ * ring_weight[j]);
      }
    }
  }
  return g;
}

ScalarField make_field(const CapGrid& grid, const std::function<double(double, double)>& f,
                       bool neumann) {
  ScalarField out;
  out.grid_id = grid.id();
  out.neumann = neumann;
  out.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = f(grid.theta(i), grid.psi(i));
  return out;
}

ScalarField constant_field(const CapGrid& grid, double value, bool neumann) {
  ScalarField out;
  out.grid_id = grid.id();
  out.neumann = neumann;
  out.values.assign(grid.size(), value);
  return out;
}

FrameVec CovectorField::lowered(const CapGrid& grid, std::size_t i) const {
  const FrameVec& c = components[i];
  if (grid.is_pole(i)) return c;
  return {c.e1, c.e2 * grid.sin_theta(i)};
}

FrameVec CovectorField::raised(const CapGrid& grid, std::size_t i) const {
  const FrameVec& c = components[i];
  if (grid.is_pole(i)) return c;
  return {c.e1, c.e2 / grid.sin_theta(i)};
}

FrameSym SymTensorField::coordinate(const CapGrid& grid, std::size_t i) const {
  const FrameSym& c = components[i];
  if (grid.is_pole(i)) return c;
  const double s = grid.sin_theta(i);
  return {c.t11, c.t12 * s, c.t22 * s * s};
}

void require_same_grid(std::uint64_t field_grid, const CapGrid& grid) {
  if (field_grid != grid.id()) {
    throw Error(ErrorKind::grid_mismatch, "field does not live on this grid");
  }
}

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorKind::non_finite, std::string("non-finite value in ") + what, i, values[i]);
    }
  }
}

double trace(const FrameSym& t, int multiplicity) { return t.t11 + multiplicity * t.t22; }

double determinant(const FrameSym& t, int multiplicity) {
  const double det2 = t.t11 * t.t22 - t.t12 * t.t12;
  return multiplicity == 1 ? det2 : det2 * std::pow(t.t22, multiplicity - 1);
}

namespace detail {

double sorted_sum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

Jet axisym_jet(const double* f, const CapGrid& grid, int j, bool neumann) {
  const int n = grid.n_theta();
  const double h = grid.h_theta();
  Jet jet;
  if (j == 0) {
    const double d2 = 2.0 * (f[1] - f[0]) / (h * h);
    jet.hess = {d2, 0.0, d2};
    return jet;
  }
  double d1 = 0.0;
  double d2 = 0.0;
  if (j < n - 1) {
    d1 = (f[j + 1] - f[j - 1]) / (2.0 * h);
    d2 = (f[j + 1] - 2.0 * f[j] + f[j - 1]) / (h * h);
  } else if (neumann) {
    d2 = 2.0 * (f[n - 2] - f[n - 1]) / (h * h);
  } else {
    const OneSided os = backward_differences([f](int q) { return f[q]; }, n, h);
    d1 = os.d1;
    d2 = os.d2;
  }
  const std::size_t i = static_cast<std::size_t>(j);
  jet.grad = {d1, 0.0};
  jet.hess = {d2, 0.0, grid.cos_theta(i) / grid.sin_theta(i) * d1};
  return jet;
}

Jet ring_jet(const double* f, const CapGrid& grid, int j, int k, bool neumann) {
  const int n = grid.n_theta();
  const double h = grid.h_theta();
  const double hp = grid.h_psi();
  auto at = [&](int jj, int kk) { return f[grid.index(jj, kk)]; };
  auto dpsi = [&](int jj) {
    if (jj == 0) return 0.0;
    return (at(jj, k + 1) - at(jj, k - 1)) / (2.0 * hp);
  };

  double ft = 0.0;
  double ftt = 0.0;
  double ftp = 0.0;
  if (j < n - 1) {
    ft = (at(j + 1, k) - at(j - 1, k)) / (2.0 * h);
    ftt = (at(j + 1, k) - 2.0 * at(j, k) + at(j - 1, k)) / (h * h);
    ftp = (dpsi(j + 1) - dpsi(j - 1)) / (2.0 * h);
  } else if (neumann) {
    ftt = 2.0 * (at(n - 2, k) - at(n - 1, k)) / (h * h);
  } else {
    const OneSided os = backward_differences([&](int q) { return at(q, k); }, n, h);
    ft = os.d1;
    ftt = os.d2;
    ftp = backward_differences(dpsi, n, h).d1;
  }
  const double fp = dpsi(j);
  const double fpp = (at(j, k + 1) - 2.0 * at(j, k) + at(j, k - 1)) / (hp * hp);

  const std::size_t i = grid.index(j, k);
  const double s = grid.sin_theta(i);
  const double c = grid.cos_theta(i);
  Jet jet;
  jet.grad = {ft, fp / s};
  jet.hess = {ftt, (ftp - c / s * fp) / s, (fpp + s * c * ft) / (s * s)};
  return jet;
}

Jet pole_direction_jet(const double* f, const CapGrid& grid, int k) {
  const int np = grid.n_psi();
  const int quarter = np / 4;
  const int half = np / 2;
  const double h = grid.h_theta();
  const double h2 = h * h;
  const double f0 = f[0];
  auto r = [&](int kk) { return f[grid.index(1, kk)]; };

  const double a = (r(k) - r(k + half)) / (2.0 * h);
  const double b = (r(k + quarter) - r(k + quarter + half)) / (2.0 * h);
  const double fxx = (r(k) - 2.0 * f0 + r(k + half)) / h2;
  const double fyy = (r(k + quarter) - 2.0 * f0 + r(k + quarter + half)) / h2;
  const double dp = (r(k + 1) - 2.0 * f0 + r(k + 1 + half)) / h2;
  const double dm = (r(k - 1) - 2.0 * f0 + r(k - 1 + half)) / h2;
  const double fxy = (dp - dm) / (2.0 * std::sin(2.0 * grid.h_psi()));

  Jet jet;
  jet.grad = {a, b};
  jet.hess = {fxx, fxy, fyy};
  return jet;
}

Jet pole_jet(const double* f, const CapGrid& grid) {
  const int np = grid.n_psi();
  Jet acc;
  for (int k = 0; k < np; ++k) {
    const Jet d = pole_direction_jet(f, grid, k);
    const double c = std::cos(k * grid.h_psi());
    const double s = std::sin(k * grid.h_psi());
    acc.grad.e1 += c * d.grad.e1 - s * d.grad.e2;
    acc.grad.e2 += s * d.grad.e1 + c * d.grad.e2;
    // R H R^T with R the rotation by psi_k
    const double h11 = d.hess.t11, h12 = d.hess.t12, h22 = d.hess.t22;
    acc.hess.t11 += c * c * h11 - 2.0 * c * s * h12 + s * s * h22;
    acc.hess.t12 += c * s * (h11 - h22) + (c * c - s * s) * h12;
    acc.hess.t22 += s * s * h11 + 2.0 * c * s * h12 + c * c * h22;
  }
  const double inv = 1.0 / np;
  acc.grad.e1 *= inv;
  acc.grad.e2 *= inv;
  acc.hess.t11 *= inv;
  acc.hess.t12 *= inv;
  acc.hess.t22 *= inv;
  return acc;
}

Jet node_jet(const double* f, const CapGrid& grid, std::size_t i, bool neumann) {
  if (grid.mode() == GridMode::axisymmetric) return axisym_jet(f, grid, grid.ring(i), neumann);
  if (grid.is_pole(i)) return pole_jet(f, grid);
  return ring_jet(f, grid, grid.ring(i), grid.column(i), neumann);
}

double d_theta(std::span<const double> f, const CapGrid& grid, std::size_t i) {
  const int j = grid.ring(i);
  const int k = grid.column(i);
  const int n = grid.n_theta();
  const double h = grid.h_theta();
  auto at = [&](int jj) { return f[grid.index(jj, k)]; };
  if (j == 1 && n >= 4) return (-3.0 * at(1) + 4.0 * at(2) - at(3)) / (2.0 * h);
  if (j > 0 && j < n - 1) return (at(j + 1) - at(j - 1)) / (2.0 * h);
  if (j == n - 1) return backward_differences(at, n, h).d1;
  return 0.0;
}

double d_psi(std::span<const double> f, const CapGrid& grid, std::size_t i) {
  if (grid.mode() != GridMode::full2d || grid.is_pole(i)) return 0.0;
  const int j = grid.ring(i);
  const int k = grid.column(i);
  return (f[grid.index(j, k + 1)] - f[grid.index(j, k - 1)]) / (2.0 * grid.h_psi());
}

}  // namespace detail

CovectorField gradient(const ScalarField& f, const CapGrid& grid) {
  require_same_grid(f.grid_id, grid);
  require_finite(f.values, "gradient input");
  CovectorField out;
  out.grid_id = grid.id();
  out.components.resize(grid.size());
  out.norm2.resize(grid.size());
  const int m = grid.angular_multiplicity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const FrameVec g = detail::node_jet(f.values.data(), grid, i, f.neumann).grad;
    out.components[i] = g;
    out.norm2[i] = g.e1 * g.e1 + (m == 1 ? g.e2 * g.e2 : 0.0);
  }
  return out;
}

SymTensorField hessian(const ScalarField& f, const CapGrid& grid) {
  require_same_grid(f.grid_id, grid);
  require_finite(f.values, "hessian input");
  SymTensorField out;
  out.grid_id = grid.id();
  out.components.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.components[i] = detail::node_jet(f.values.data(), grid, i, f.neumann).hess;
  }
  return out;
}

double integrate(std::span<const double> values, const CapGrid& grid) {
  if (values.size() != grid.size()) {
    throw Error(ErrorKind::grid_mismatch, "integrand size does not match grid");
  }
  const auto w = grid.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) sum += w[i] * values[i];
  return sum;
}

double integrate(const ScalarField& f, const CapGrid& grid) {
  require_same_grid(f.grid_id, grid);
  return integrate(f.values, grid);
}

}  // namespace icf
