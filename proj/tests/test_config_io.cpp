#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "icf/io.hpp"
#include "support.hpp"

using namespace icf;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::string& text, const std::vector<std::string>& ov = {}) {
  try {
    parse_config(text, ov);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "config accepted:\n" << text;
  return ErrorKind::invalid_argument;
}

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("icf_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, MinimalConfigUsesDefaults) {
  const Config c = parse_config("[flow]\nt_end = 1\n");
  EXPECT_EQ(c.n_dim, 2);
  EXPECT_EQ(c.mode, GridMode::axisymmetric);
  EXPECT_EQ(c.stepper, Stepper::rk4);
  EXPECT_DOUBLE_EQ(*c.t_end, 1.0);
  EXPECT_FALSE(c.s_end.has_value());
  EXPECT_FALSE(c.c.has_value());
}

TEST(Config, NumberGrammar) {
  EXPECT_DOUBLE_EQ(parse_number("pi/3"), std::numbers::pi / 3);
  EXPECT_DOUBLE_EQ(parse_number("2*pi/5"), 2 * std::numbers::pi / 5);
  EXPECT_DOUBLE_EQ(parse_number("1e-3"), 1e-3);
  EXPECT_DOUBLE_EQ(parse_number(" -0.5 "), -0.5);
  EXPECT_THROW(parse_number("pie"), Error);
  EXPECT_THROW(parse_number("1/0"), Error);
  EXPECT_THROW(parse_number(""), Error);
}

TEST(Config, NonConvexCapRejected) {
  EXPECT_EQ(kind_of("[grid]\ntheta_max = 2.0\n"), ErrorKind::config_value);
  EXPECT_NE(message_of("[grid]\ntheta_max = 2.0\n").find("not convex"), std::string::npos);
  EXPECT_NO_THROW(parse_config("[grid]\ntheta_max = pi/2\n"));
}

TEST(Config, SyntaxErrorsCarryLineNumbers) {
  EXPECT_EQ(kind_of("[grid]\nn_theta 41\n"), ErrorKind::config_syntax);
  EXPECT_NE(message_of("[grid]\n\nn_theta 41\n").find("line 3"), std::string::npos);
  EXPECT_EQ(kind_of("[grid\n"), ErrorKind::config_syntax);
  EXPECT_EQ(kind_of("[grid]\nn_theta = 41\nn_theta = 51\n"), ErrorKind::config_syntax);
}

TEST(Config, UnknownNamesRejected) {
  EXPECT_EQ(kind_of("[grid]\nresolution = 41\n"), ErrorKind::config_value);
  EXPECT_EQ(kind_of("[solver]\n"), ErrorKind::config_value);
  EXPECT_EQ(kind_of("[verify]\nchecks = c0, bogus\n"), ErrorKind::config_value);
  EXPECT_EQ(kind_of("[flow]\nstepper = leapfrog\n"), ErrorKind::config_value);
  EXPECT_EQ(kind_of("[grid]\nn_theta = 4.5\n"), ErrorKind::config_value);
}

TEST(Config, ValueRangesChecked) {
  EXPECT_EQ(kind_of("[grid]\nmode = full2d\nn_psi = 10\n"), ErrorKind::config_value);
  EXPECT_EQ(kind_of("[grid]\nmode = full2d\nn_dim = 3\n"), ErrorKind::config_value);
  EXPECT_EQ(kind_of("[flow]\nalpha = -1\n"), ErrorKind::config_value);
  EXPECT_EQ(kind_of("[flow]\ncfl_safety = 1.5\n"), ErrorKind::config_value);
  EXPECT_EQ(kind_of("[output]\nrecord_every = 0\n"), ErrorKind::config_value);
}

TEST(Config, OverridesApplyAfterText) {
  const Config c = parse_config("[grid]\nn_theta = 41\n", {"grid.n_theta=81", "flow.alpha = 0.5",
                                                          "name=renamed"});
  EXPECT_EQ(c.n_theta, 81);
  EXPECT_DOUBLE_EQ(c.alpha, 0.5);
  EXPECT_EQ(c.name, "renamed");
  EXPECT_EQ(kind_of("", {"grid.n_theta"}), ErrorKind::config_syntax);
  EXPECT_EQ(kind_of("", {"grid.size=3"}), ErrorKind::config_value);
}

TEST(Config, EchoRoundTrips) {
  Config c = parse_config(fixtures::small_benchmark, {"verify.checks=c0,radius", "rescale.c=0.01",
                                                      "output.snapshot_times=0.5,1.5"});
  const std::string e1 = echo_config(c);
  const Config back = parse_config(e1);
  EXPECT_EQ(echo_config(back), e1);
  EXPECT_EQ(back.checks, c.checks);
  EXPECT_EQ(back.snapshot_times, c.snapshot_times);
  EXPECT_EQ(*back.c, 0.01);
  EXPECT_EQ(*back.s_end, *c.s_end);
}

TEST(Io, DoublesRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    EXPECT_EQ(io::parse_double(io::format_double(x)), x);
  }
  EXPECT_EQ(io::format_double(0.5), "0.5");
  EXPECT_THROW(io::parse_double("1.0x"), Error);
}

TEST(Io, TimeseriesAndSnapshotRoundTrip) {
  const RunOutcome out = fixtures::run_config(fixtures::config_from(fixtures::small_benchmark,
                                                                  {"flow.s_end=0.5"}));
  const Trajectory& tr = out.trajectory;
  const auto rows = io::parse_timeseries(io::timeseries_csv(tr.samples));
  ASSERT_EQ(rows.size(), tr.samples.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(sample_values(rows[k]), sample_values(tr.samples[k]));
  }
  const Snapshot& s = tr.snapshots.back();
  const Snapshot back = io::parse_snapshot(io::snapshot_csv(s, tr.grid), tr.grid);
  EXPECT_EQ(back.t, s.t);
  EXPECT_EQ(back.s, s.s);
  EXPECT_EQ(back.u.values, s.u.values);
  const CapGrid other = build_cap_grid(2, 1.0, {41, 16}, GridMode::full2d);
  EXPECT_THROW(io::parse_snapshot(io::snapshot_csv(s, tr.grid), other), Error);

  Trajectory st;
  io::parse_status(io::status_text(tr), st);
  EXPECT_EQ(st.termination, tr.termination);
  EXPECT_THROW(io::parse_status("exploded\n\n", st), Error);
}

TEST(Experiment, RunThenVerifyReproducesReport) {
  const fs::path dir = scratch("model");
  const Config cfg = fixtures::config_from(fixtures::model_config);
  std::ostringstream log;
  ASSERT_EQ(run_experiment(cfg, dir, log), exit_ok) << log.str();
  for (const char* f : {"config.echo", "timeseries.csv", "snap_0.csv", "report.json", "run.status"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  std::ostringstream vlog;
  EXPECT_EQ(verify_directory(dir, vlog), exit_ok) << vlog.str();
  EXPECT_NE(vlog.str().find("reproduced"), std::string::npos);

  // rerun is byte-identical
  const fs::path dir2 = scratch("model2");
  ASSERT_EQ(run_experiment(cfg, dir2, log), exit_ok);
  for (const char* f : {"config.echo", "timeseries.csv", "snap_3.csv", "report.json"}) {
    EXPECT_EQ(io::read_text(dir / f), io::read_text(dir2 / f)) << f;
  }

  // a tampered report no longer reproduces
  std::string rep = io::read_text(dir / "report.json");
  rep.insert(rep.size() - 2, " ");
  io::write_text(dir / "report.json", rep);
  std::ostringstream tlog;
  EXPECT_EQ(verify_directory(dir, tlog), exit_checks_failed);
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST(Experiment, ExitCodes) {
  std::ostringstream log;
  const fs::path dir = scratch("codes");
  Config bad_data = fixtures::config_from(fixtures::model_config, {"initial.eps=0.9", "initial.k_radial=3"});
  EXPECT_EQ(run_experiment(bad_data, dir, log), exit_abnormal);
  Config bad_c = fixtures::config_from(fixtures::model_config, {"rescale.c=0.5"});
  EXPECT_EQ(run_experiment(bad_c, dir, log), exit_config);
  Config failing = fixtures::config_from(fixtures::model_config,
                                        {"verify.checks=H_theta", "verify.H_band_scale=0.01",
                                         "initial.eps=0.05"});
  EXPECT_EQ(run_experiment(failing, dir, log), exit_checks_failed);
  fs::remove_all(dir);
}

TEST(Experiment, StudyNeedsThreeGrids) {
  std::ostringstream log;
  const fs::path dir = scratch("study");
  const Config cfg = fixtures::config_from(fixtures::model_config, {"flow.t_end=0.5"});
  EXPECT_EQ(convergence_study(cfg, {21, 41}, dir, log), exit_config);
  EXPECT_EQ(convergence_study(cfg, {11, 21, 41}, dir, log), exit_ok) << log.str();
  const std::string orders = io::read_text(dir / "orders.csv");
  EXPECT_EQ(orders.rfind("quantity,n_theta,h,error,observed_order,flag\n", 0), 0u);
  EXPECT_NE(orders.find("H_oracle"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Experiment, ObservedOrder) {
  EXPECT_DOUBLE_EQ(observed_order(4e-4, 1e-4, 0.02, 0.01), 2.0);
}
