#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "icf/sphere_geom.hpp"

using namespace icf;

namespace {

constexpr double pi = std::numbers::pi;

CapGrid axisym(int n_theta, double tm = pi / 3, int n = 2) {
  return build_cap_grid(n, tm, {n_theta, 0}, GridMode::axisymmetric);
}

CapGrid full(int n_theta, int n_psi, double tm = pi / 3) {
  return build_cap_grid(2, tm, {n_theta, n_psi}, GridMode::full2d);
}

double order(double e0, double e1) { return std::log2(e0 / e1); }

struct Errors {
  double grad = 0.0;
  double hess = 0.0;
};

// f = cos(theta) restricted to the cap: grad = -sin theta e1, Hess = -cos theta sigma
Errors axisym_errors(int n_theta) {
  const CapGrid g = axisym(n_theta);
  const ScalarField f = make_field(g, [](double th, double) { return std::cos(th); }, false);
  const CovectorField d = gradient(f, g);
  const SymTensorField h = hessian(f, g);
  Errors e;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double th = g.theta(i);
    e.grad = std::max(e.grad, std::abs(d.components[i].e1 + std::sin(th)));
    e.hess = std::max({e.hess, std::abs(h.components[i].t11 + std::cos(th)),
                       std::abs(h.components[i].t22 + std::cos(th))});
  }
  return e;
}

// f = x = sin theta cos psi: Hess = -x sigma. Pointwise errors on the first
// ring are O(h_psi^2 / h) (polar chart), so the full grid is measured in the
// quadrature L2 norm and in max norm away from the pole.
struct FullErrors {
  Errors l2;
  Errors far;
};

FullErrors full_errors(int n_theta, int n_psi) {
  const CapGrid g = full(n_theta, n_psi);
  const ScalarField f =
      make_field(g, [](double th, double ps) { return std::sin(th) * std::cos(ps); }, false);
  const CovectorField d = gradient(f, g);
  const SymTensorField h = hessian(f, g);
  FullErrors e;
  const auto w = g.weights();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double th = g.theta(i), ps = g.psi(i);
    const double x = std::sin(th) * std::cos(ps);
    FrameVec want{std::cos(th) * std::cos(ps), -std::sin(ps)};
    if (g.is_pole(i)) want = {1.0, 0.0};
    const double eg = std::max(std::abs(d.components[i].e1 - want.e1),
                               std::abs(d.components[i].e2 - want.e2));
    const double eh = std::max({std::abs(h.components[i].t11 + x),
                                std::abs(h.components[i].t22 + x), std::abs(h.components[i].t12)});
    e.l2.grad += w[i] * eg * eg;
    e.l2.hess += w[i] * eh * eh;
    if (th >= g.theta_max() / 4) {
      e.far.grad = std::max(e.far.grad, eg);
      e.far.hess = std::max(e.far.hess, eh);
    }
  }
  e.l2.grad = std::sqrt(e.l2.grad);
  e.l2.hess = std::sqrt(e.l2.hess);
  return e;
}

}  // namespace

TEST(CapGrid, RejectsBadGeometry) {
  EXPECT_THROW(axisym(41, 2.0), Error);
  EXPECT_THROW(axisym(2), Error);
  EXPECT_THROW(build_cap_grid(3, pi / 3, {21, 16}, GridMode::full2d), Error);
  EXPECT_THROW(full(21, 10), Error);
  EXPECT_THROW(full(21, 4), Error);
  EXPECT_NO_THROW(axisym(21, pi / 2));
}

TEST(CapGrid, WeightsArePositive) {
  for (const CapGrid& g : {axisym(31), axisym(31, pi / 2, 4), full(21, 16)}) {
    for (double w : g.weights()) EXPECT_GT(w, 0.0);
  }
}

TEST(CapGrid, NodeLayout) {
  const CapGrid g = full(11, 8);
  EXPECT_EQ(g.size(), 1u + 10u * 8u);
  EXPECT_TRUE(g.is_pole(g.index(0)));
  EXPECT_EQ(g.ring(g.index(3, 5)), 3);
  EXPECT_EQ(g.column(g.index(3, 5)), 5);
  EXPECT_EQ(g.boundary_index().size(), 8u);
  for (std::size_t b : g.boundary_index()) EXPECT_TRUE(g.is_boundary(b));
  EXPECT_NE(axisym(11).id(), axisym(21).id());
}

TEST(Quadrature, ConstantIntegratesToCapArea) {
  for (int n : {2, 3, 5}) {
    const CapGrid g = axisym(81, pi / 3, n);
    const double a = integrate(constant_field(g, 1.0), g);
    EXPECT_NEAR(a / g.cap_area(), 1.0, 1e-3) << "n = " << n;
  }
  const CapGrid g2 = full(41, 16);
  EXPECT_NEAR(integrate(constant_field(g2, 1.0), g2) / g2.cap_area(), 1.0, 1e-3);
  // S^2 cap of half-angle a has area 2 pi (1 - cos a)
  EXPECT_NEAR(axisym(5).cap_area(), 2.0 * pi * (1.0 - std::cos(pi / 3)), 1e-14);
}

TEST(Quadrature, SecondOrderUnderRefinement) {
  // \int cos theta over the cap of S^2 is pi sin^2(a)
  const double a = pi / 3;
  const double exact = pi * std::sin(a) * std::sin(a);
  std::vector<double> err;
  for (int n : {51, 101, 201}) {
    const CapGrid g = axisym(n, a);
    err.push_back(std::abs(integrate(make_field(g, [](double th, double) { return std::cos(th); }, false), g) - exact));
  }
  const double p = order(err[1], err[2]);
  EXPECT_GE(p, 1.8) << "errors " << err[0] << " " << err[1] << " " << err[2];
}

TEST(Quadrature, IntegrateChecksGrid) {
  const CapGrid g = axisym(21);
  const ScalarField f = constant_field(axisym(31), 1.0);
  EXPECT_THROW(integrate(f, g), Error);
}

TEST(Derivatives, AxisymmetricSecondOrder) {
  const Errors e0 = axisym_errors(51), e1 = axisym_errors(101), e2 = axisym_errors(201);
  EXPECT_NEAR(order(e1.grad, e2.grad), 2.0, 0.2);
  EXPECT_NEAR(order(e1.hess, e2.hess), 2.0, 0.2);
  EXPECT_LT(e2.hess, e0.hess);
}

TEST(Derivatives, Full2dSecondOrder) {
  const FullErrors e1 = full_errors(41, 32), e2 = full_errors(81, 64);
  EXPECT_NEAR(order(e1.far.grad, e2.far.grad), 2.0, 0.2);
  EXPECT_NEAR(order(e1.far.hess, e2.far.hess), 2.0, 0.2);
  EXPECT_NEAR(order(e1.l2.grad, e2.l2.grad), 2.0, 0.2);
  EXPECT_NEAR(order(e1.l2.hess, e2.l2.hess), 2.0, 0.2);
}

TEST(Derivatives, PoleIsRegular) {
  const CapGrid g = axisym(41);
  const ScalarField f = make_field(g, [](double th, double) { return std::cos(th); }, false);
  const SymTensorField h = hessian(f, g);
  const FrameSym p = h.components[g.index(0)];
  EXPECT_TRUE(std::isfinite(p.t11) && std::isfinite(p.t22));
  EXPECT_NEAR(p.t11, -1.0, 1e-3);
  EXPECT_NEAR(p.t22, -1.0, 1e-3);
  EXPECT_EQ(gradient(f, g).components[0].e1, 0.0);
}

TEST(Derivatives, NeumannReflectionKillsBoundarySlope) {
  const CapGrid g = axisym(41);
  // even about theta_max: f'(theta_max) = 0
  const double tm = g.theta_max();
  const ScalarField f =
      make_field(g, [tm](double th, double) { return std::cos(pi * th / tm); }, true);
  const CovectorField d = gradient(f, g);
  for (std::size_t b : g.boundary_index()) EXPECT_EQ(d.components[b].e1, 0.0);
}

TEST(Tensors, TraceAndDeterminantWithMultiplicity) {
  const FrameSym t{2.0, 0.0, 3.0};
  EXPECT_DOUBLE_EQ(trace(t, 1), 5.0);
  EXPECT_DOUBLE_EQ(trace(t, 3), 11.0);
  EXPECT_DOUBLE_EQ(determinant(t, 2), 18.0);
  EXPECT_DOUBLE_EQ(determinant(FrameSym{2.0, 1.0, 3.0}, 1), 5.0);
}

TEST(Tensors, CoordinateComponentsUseSinTheta) {
  const CapGrid g = full(11, 8);
  const ScalarField f =
      make_field(g, [](double th, double ps) { return std::sin(th) * std::sin(ps); }, false);
  const CovectorField d = gradient(f, g);
  const std::size_t i = g.index(4, 1);
  const FrameVec c = d.lowered(g, i);
  EXPECT_NEAR(c.e2, d.components[i].e2 * g.sin_theta(i), 1e-15);
  const FrameVec r = d.raised(g, i);
  EXPECT_NEAR(r.e2, d.components[i].e2 / g.sin_theta(i), 1e-14);
}

TEST(Validation, RejectsNonFinite) {
  std::vector<double> v{1.0, std::nan(""), 2.0};
  try {
    require_finite(v, "test");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_finite);
    EXPECT_EQ(e.node(), 1u);
  }
}

TEST(SortedSum, PermutationInvariant) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(64);
  for (double& x : v) x = dist(rng) * std::pow(10.0, dist(rng) * 8);
  std::vector<double> a = v;
  const double s0 = detail::sorted_sum(a);
  for (int k = 0; k < 10; ++k) {
    std::shuffle(v.begin(), v.end(), rng);
    std::vector<double> b = v;
    EXPECT_EQ(detail::sorted_sum(b), s0);
  }
}
