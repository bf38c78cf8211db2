#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "icf/kernels.hpp"

using namespace icf;

namespace {

constexpr double pi = std::numbers::pi;

// Neumann-compatible profile vanishing to order m at the pole
double fm(double th, double tm, int m) {
  const double sm = std::sin(tm), cot = std::cos(tm) / sm;
  const double b = -m * cot / (sm + m * cot * (1.0 - std::cos(tm)));
  return std::pow(std::sin(th) / sm, m) * (1.0 + b * (1.0 - std::cos(th)));
}

std::vector<double> bumpy_phi(const CapGrid& g) {
  const double tm = g.theta_max();
  const bool full = g.mode() == GridMode::full2d;
  std::vector<double> phi(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double th = g.theta(i), ps = g.psi(i);
    phi[i] = 0.05 * std::cos(pi * th / tm);
    if (full) phi[i] += 0.03 * fm(th, tm, 2) * std::cos(2 * ps + 0.3) + 0.01 * fm(th, tm, 1) * std::sin(ps);
  }
  return phi;
}

void expect_bit_equal(const CapGrid& g, const kernels::RhsArgs& args) {
  const std::vector<double> phi = bumpy_phi(g);
  std::vector<double> a(g.size()), b(g.size()), ra(g.size()), rb(g.size());
  const auto sa = kernels::rhs_serial(g, phi, args, a, ra);
  const auto sb = kernels::rhs_parallel(g, phi, args, b, rb);
  EXPECT_TRUE(sa.ok());
  EXPECT_TRUE(sb.ok());
  for (std::size_t i = 0; i < g.size(); ++i) {
    ASSERT_EQ(a[i], b[i]) << "node " << i;
    ASSERT_EQ(ra[i], rb[i]) << "node " << i;
  }
}

}  // namespace

TEST(Kernels, SerialAndParallelAgreeBitForBit) {
  expect_bit_equal(build_cap_grid(2, pi / 3, {1001, 0}, GridMode::axisymmetric), {1.0, 0.0, 1e-8});
  expect_bit_equal(build_cap_grid(3, pi / 3, {701, 0}, GridMode::axisymmetric), {0.5, 1.0 / 3, 1e-8});
  expect_bit_equal(build_cap_grid(2, pi / 3, {41, 32}, GridMode::full2d), {1.0, 0.5, 1e-8});
}

TEST(Kernels, ConstantFieldSpeed) {
  const CapGrid g = build_cap_grid(2, pi / 3, {21, 0}, GridMode::axisymmetric);
  const double r = 1.5;
  std::vector<double> phi(g.size(), std::log(r)), q(g.size()), rate(g.size());
  kernels::rhs_serial(g, phi, {1.0, 0.0, 1e-8}, q, rate);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(q[i], 1.0 / (r * 2.0), 1e-15);
    EXPECT_NEAR(rate[i], 1.0 / (r * 4.0), 1e-15);
  }
}

TEST(Kernels, UnitSphereIsStationaryForRescaledEquation) {
  for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
    for (int n : {2, 3}) {
      const CapGrid g = build_cap_grid(n, pi / 3, {31, 0}, GridMode::axisymmetric);
      std::vector<double> phi(g.size(), 0.0), q(g.size());
      kernels::rhs_serial(g, phi, {alpha, 1.0 / n, 1e-8}, q);
      for (double x : q) EXPECT_LE(std::abs(x), 1e-13);
    }
  }
}

TEST(Kernels, ReportsSmallestFailingNode) {
  const CapGrid g = build_cap_grid(2, pi / 3, {1001, 0}, GridMode::axisymmetric);
  std::vector<double> phi(g.size(), 0.0);
  // sharp convex dents make the denominator negative
  for (std::size_t i : {700u, 300u}) phi[i] = -0.2;
  std::vector<double> a(g.size()), b(g.size());
  const auto sa = kernels::rhs_serial(g, phi, {}, a);
  const auto sb = kernels::rhs_parallel(g, phi, {}, b);
  EXPECT_FALSE(sa.ok());
  EXPECT_EQ(sa.bad_node, 300u);
  EXPECT_EQ(sb.bad_node, 300u);
  EXPECT_EQ(sa.bad_denominator, sb.bad_denominator);
}

TEST(Kernels, StepRatioScalesWithSpacingSquared) {
  const CapGrid g1 = build_cap_grid(2, pi / 3, {21, 0}, GridMode::axisymmetric);
  const CapGrid g2 = build_cap_grid(2, pi / 3, {41, 0}, GridMode::axisymmetric);
  std::vector<double> r1(g1.size(), 0.5), r2(g2.size(), 0.5);
  EXPECT_NEAR(kernels::min_step_ratio(g1, r1) / kernels::min_step_ratio(g2, r2), 4.0, 1e-12);
  std::vector<double> zero(g1.size(), 0.0);
  EXPECT_TRUE(std::isinf(kernels::min_step_ratio(g1, zero)));
}
