#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "icf/flow.hpp"
#include "icf/graph_geom.hpp"

using namespace icf;

namespace {

constexpr double pi = std::numbers::pi;

CapGrid axisym(int n_theta) { return build_cap_grid(2, pi / 3, {n_theta, 0}, GridMode::axisymmetric); }

double model_error(double alpha, Stepper stepper, double t_end = 4.0) {
  const CapGrid g = axisym(21);
  FlowParams p;
  p.alpha = alpha;
  p.t_end = t_end;
  p.stepper = stepper;
  const RescaleContext ctx{alpha, 2, 0.0};
  const Trajectory tr = run_flow(constant_field(g, 1.0), g, p, ctx);
  EXPECT_EQ(tr.termination, Termination::reached_end);
  const double exact = theta(t_end, ctx);
  double e = 0.0;
  for (double u : tr.snapshots.back().u.values) e = std::max(e, std::abs(u - exact) / exact);
  return e;
}

FlowState constant_state(const CapGrid& g, double r) {
  FlowState st;
  st.phi = constant_field(g, std::log(r));
  return st;
}

ScalarField asymmetric_data(const CapGrid& g) {
  // f_2 profile from the initial-data family, with two angular phases
  const double tm = g.theta_max(), sm = std::sin(tm), cot = std::cos(tm) / sm;
  const double b = -2 * cot / (sm + 2 * cot * (1.0 - std::cos(tm)));
  return make_field(
      g,
      [=](double th, double ps) {
        const double f = std::pow(std::sin(th) / sm, 2) * (1.0 + b * (1.0 - std::cos(th)));
        return 1.0 + 0.04 * f * (std::cos(2 * ps) + 0.5 * std::sin(2 * ps + 0.7));
      },
      true);
}

ScalarField shift_psi(const ScalarField& f, const CapGrid& g, int by) {
  ScalarField out = f;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_pole(i)) continue;
    const int k = (g.column(i) + by) % g.n_psi();
    out[g.index(g.ring(i), k)] = f[i];
  }
  return out;
}

}  // namespace

TEST(Flow, ModelSolutionAlphaOne) { EXPECT_LE(model_error(1.0, Stepper::rk4), 1e-8); }

TEST(Flow, ModelSolutionAlphaZero) { EXPECT_LE(model_error(0.0, Stepper::rk4), 1e-8); }

TEST(Flow, ModelSolutionOtherAlpha) {
  EXPECT_LE(model_error(0.5, Stepper::rk4), 1e-8);
  EXPECT_LE(model_error(2.0, Stepper::rk4), 1e-8);
}

TEST(Flow, EulerIsFirstOrderOnTheModel) {
  EXPECT_GT(model_error(1.0, Stepper::euler, 1.0), 1e-6);
}

TEST(Flow, Rk4LocalErrorIsFifthOrder) {
  const CapGrid g = axisym(11);
  FlowParams p;
  const RescaleContext ctx{1.0, 2, 0.0};
  auto err = [&](double dt) {
    const FlowState s = step(constant_state(g, 1.0), g, p, dt);
    return std::abs(std::exp(s.phi[0]) - theta(dt, ctx));
  };
  const double ratio = err(0.4) / err(0.2);
  EXPECT_NEAR(std::log2(ratio), 5.0, 0.3);
}

TEST(Flow, StableDtScaling) {
  FlowParams p;
  p.cfl_safety = 0.4;
  const CapGrid g1 = axisym(21), g2 = axisym(41);
  const double dt1 = stable_dt(constant_state(g1, 1.0), g1, p);
  const double dt2 = stable_dt(constant_state(g2, 1.0), g2, p);
  EXPECT_NEAR(dt1 / dt2, 4.0, 1e-9);
  p.cfl_safety = 0.2;
  EXPECT_NEAR(stable_dt(constant_state(g1, 1.0), g1, p) / dt1, 0.5, 1e-15);
}

TEST(Flow, RhsQMatchesSpeedOverSupport) {
  const CapGrid g = axisym(41);
  const ScalarField u = make_initial_data(g, {1.0, 0.05, 1, 0});
  ScalarField phi = u;
  for (double& x : phi.values) x = std::log(x);
  const ScalarField q = rhs_Q(phi, g, 1.0);
  const GraphGeometry geo = graph_geometry(u, g, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(q[i], geo.psi[i], 1e-12);
}

TEST(InitialData, FamilyMembers) {
  const CapGrid g = axisym(41);
  const ScalarField u = make_initial_data(g, {2.0, 0.05, 1, 0});
  EXPECT_NEAR(u[0], 2.1, 1e-15);
  EXPECT_NEAR(u[g.size() - 1], 1.9, 1e-15);
  EXPECT_TRUE(u.neumann);
}

TEST(InitialData, Rejections) {
  const CapGrid g = axisym(41);
  try {
    make_initial_data(g, {1.0, 0.9, 3, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::initial_not_mean_convex);
  }
  for (double eps : {1.0, -1.5}) {
    try {
      make_initial_data(g, {1.0, eps, 1, 0});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::eps_too_large);
    }
  }
  // slope at theta_max is O(1), not O(h^2)
  const ScalarField bad = make_field(g, [](double th, double) { return 1.0 + 0.05 * th; }, true);
  EXPECT_THROW(validate_initial_data(bad, g, 1e-8), Error);
  EXPECT_THROW(make_initial_data(g, {-1.0, 0.0, 1, 0}), Error);
}

TEST(Flow, ParamsValidation) {
  FlowParams p;
  p.t_end = -1.0;
  EXPECT_THROW(validate_params(p), Error);
  p = FlowParams{};
  p.cfl_safety = 0.0;
  EXPECT_THROW(validate_params(p), Error);
  p = FlowParams{};
  p.record_every = 0;
  EXPECT_THROW(validate_params(p), Error);
}

TEST(Flow, LandsOnSnapshotTimesAndStaysStarShaped) {
  const CapGrid g = axisym(41);
  FlowParams p;
  p.t_end = 1.0;
  p.snapshot_times = {0.25, 0.5, 0.7};
  p.record_every = 7;
  const Trajectory tr = run_flow(make_initial_data(g, {1.0, 0.05, 1, 0}), g, p, {1.0, 2, 0.0});
  ASSERT_EQ(tr.snapshots.size(), 5u);
  EXPECT_EQ(tr.snapshots[0].t, 0.0);
  EXPECT_EQ(tr.snapshots[1].t, 0.25);
  EXPECT_EQ(tr.snapshots[3].t, 0.7);
  EXPECT_EQ(tr.snapshots[4].t, 1.0);
  EXPECT_EQ(tr.samples.back().t, 1.0);
  for (const Sample& s : tr.samples) EXPECT_GT(s.w_min, 0.0);
}

TEST(Flow, NeumannConsistencyOfSteppedField) {
  const CapGrid g = axisym(81);
  FlowParams p;
  p.t_end = 0.5;
  const Trajectory tr = run_flow(make_initial_data(g, {1.0, 0.05, 2, 0}), g, p, {1.0, 2, 0.0});
  std::vector<double> phi(tr.snapshots.back().u.values);
  for (double& x : phi) x = std::log(x);
  const double h = g.h_theta();
  for (std::size_t b : g.boundary_index()) {
    EXPECT_LE(std::abs(detail::d_theta(phi, g, b)), 10.0 * h * h);
  }
}

TEST(Flow, PsiShiftEquivarianceIsBitExact) {
  const CapGrid g = build_cap_grid(2, pi / 3, {13, 16}, GridMode::full2d);
  const ScalarField u0 = asymmetric_data(g);
  FlowParams p;
  p.t_end = 0.05;
  const RescaleContext ctx{1.0, 2, 0.0};
  const Trajectory a = run_flow(u0, g, p, ctx);
  const Trajectory b = run_flow(shift_psi(u0, g, 1), g, p, ctx);
  ASSERT_EQ(a.steps, b.steps);
  const ScalarField ua = shift_psi(a.snapshots.back().u, g, 1);
  const ScalarField& ub = b.snapshots.back().u;
  for (std::size_t i = 0; i < g.size(); ++i) ASSERT_EQ(ua[i], ub[i]) << "node " << i;
}

TEST(Flow, AxisymmetricDataStaysAxisymmetricOnFullGrid) {
  const CapGrid g = build_cap_grid(2, pi / 3, {21, 16}, GridMode::full2d);
  FlowParams p;
  p.t_end = 0.5;
  const Trajectory tr = run_flow(make_initial_data(g, {1.0, 0.05, 1, 0}), g, p, {1.0, 2, 0.0});
  const ScalarField& u = tr.snapshots.back().u;
  for (int j = 1; j < g.n_theta(); ++j) {
    for (int k = 1; k < g.n_psi(); ++k) {
      EXPECT_NEAR(u[g.index(j, k)], u[g.index(j, 0)], 1e-12);
    }
  }
}

TEST(Flow, LossOfMeanConvexityIsReported) {
  const CapGrid g = axisym(41);
  FlowParams p;
  p.eps_mc = 100.0;
  try {
    step(constant_state(g, 1.0), g, p, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::mean_convexity_lost);
    EXPECT_EQ(e.node(), 0u);
    EXPECT_DOUBLE_EQ(e.value(), 2.0);
  }
  try {
    run_flow(constant_field(g, 1.0), g, p, {1.0, 2, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::initial_not_mean_convex);
  }
}

TEST(Samples, ColumnRoundTrip) {
  Sample s;
  s.t = 1.0;
  s.sup_grad_utilde = 7.0;
  s.area = 3.0;
  const Sample r = sample_from_values(sample_values(s));
  EXPECT_EQ(sample_values(r), sample_values(s));
  EXPECT_EQ(sample_column_names().size(), sample_columns);
  EXPECT_THROW(sample_from_values({1.0}), Error);
}
