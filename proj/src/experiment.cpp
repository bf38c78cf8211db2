#include "icf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "icf/graph_geom.hpp"
#include "icf/io.hpp"
#include "icf/rescale.hpp"

namespace icf {

namespace fs = std::filesystem;

namespace {

bool is_config_error(ErrorKind k) {
  return k == ErrorKind::config_syntax || k == ErrorKind::config_value;
}

int exit_for(const Error& e) { return is_config_error(e.kind()) ? exit_config : exit_abnormal; }

void write_artifacts(const Plan& plan, const RunOutcome& out, const fs::path& dir) {
  fs::create_directories(dir);
  io::write_text(dir / "config.echo", echo_config(plan.config));
  io::write_text(dir / "timeseries.csv", io::timeseries_csv(out.trajectory.samples));
  for (std::size_t k = 0; k < out.trajectory.snapshots.size(); ++k) {
    io::write_text(dir / ("snap_" + std::to_string(k) + ".csv"),
                   io::snapshot_csv(out.trajectory.snapshots[k], plan.grid));
  }
  io::write_text(dir / "run.status", io::status_text(out.trajectory));
  io::write_text(dir / "report.json", io::report_json(out.report));
}

void print_report(const EstimateReport& rep, std::ostream& log) {
  for (const CheckResult& c : rep.checks) {
    log << (c.passed ? "PASS " : "FAIL ") << c.name << "  margin " << io::format_double(c.margin)
        << "  tol " << io::format_double(c.tolerance) << "  " << c.details << "\n";
  }
}

std::vector<std::string> checks_to_run(const Config& cfg) {
  return cfg.checks.empty() ? check_names() : cfg.checks;
}

}  // namespace

Plan make_plan(const Config& cfg, ScalarField* u0) {
  Plan plan;
  plan.config = cfg;
  try {
    plan.grid = build_cap_grid(cfg.n_dim, cfg.theta_max, {cfg.n_theta, cfg.n_psi}, cfg.mode);
  } catch (const Error& e) {
    throw Error(ErrorKind::config_value, std::string("grid: ") + e.what());
  }

  ScalarField init = make_initial_data(plan.grid, cfg.initial, cfg.eps_mc);
  const auto [lo, hi] = std::minmax_element(init.values.begin(), init.values.end());
  const double phi_min = std::log(*lo);
  const double phi_max = std::log(*hi);
  plan.ctx = midpoint_context(cfg.alpha, cfg.n_dim, phi_min, phi_max);
  if (cfg.c) plan.ctx.c = *cfg.c;
  validate_context(plan.ctx, phi_min, phi_max);
  plan.config.c = plan.ctx.c;

  plan.rescaled = cfg.time_variable == TimeVariable::s;
  FlowParams& p = plan.params;
  p.alpha = cfg.alpha;
  p.cfl_safety = cfg.cfl_safety;
  p.stepper = cfg.stepper;
  p.eps_mc = cfg.eps_mc;
  p.record_every = cfg.record_every;
  p.parallel = cfg.parallel;
  const double t_end = cfg.s_end ? time_map(*cfg.s_end, plan.ctx, TimeDirection::s_to_t)
                                 : cfg.t_end.value_or(1.0);
  const double s_end = cfg.s_end ? *cfg.s_end : time_map(t_end, plan.ctx, TimeDirection::t_to_s);
  p.t_end = plan.rescaled ? s_end : t_end;

  p.snapshot_times = cfg.snapshot_times;
  for (int k = 1; k < cfg.snapshot_count; ++k) {
    p.snapshot_times.push_back(p.t_end * k / cfg.snapshot_count);
  }
  plan.checks = checks_to_run(cfg);
  plan.verify = cfg.verify;
  if (std::find(plan.checks.begin(), plan.checks.end(), "evolution_identities") !=
      plan.checks.end()) {
    const double centre = cfg.identity_fraction * p.t_end;
    const double delta = cfg.identity_delta * p.t_end;
    p.snapshot_times.push_back(centre - delta);
    p.snapshot_times.push_back(centre);
    p.snapshot_times.push_back(centre + delta);
    plan.verify.identities.time =
        plan.rescaled ? time_map(centre, plan.ctx, TimeDirection::s_to_t) : centre;
  }
  std::sort(p.snapshot_times.begin(), p.snapshot_times.end());
  p.snapshot_times.erase(std::unique(p.snapshot_times.begin(), p.snapshot_times.end()),
                         p.snapshot_times.end());
  validate_params(p);
  if (u0) *u0 = std::move(init);
  return plan;
}

RunOutcome execute(const Plan& plan, const ScalarField& u0) {
  RunOutcome out;
  if (plan.rescaled) {
    ScalarField ut = u0;
    const double th0 = theta(0.0, plan.ctx);
    for (double& x : ut.values) x /= th0;
    out.trajectory = run_rescaled_flow(ut, plan.grid, plan.params, plan.ctx);
  } else {
    out.trajectory = run_flow(u0, plan.grid, plan.params, plan.ctx);
  }
  out.report = verify_trajectory(out.trajectory, plan.verify, plan.checks, plan.config.name);
  if (out.trajectory.termination != Termination::reached_end) out.exit_code = exit_abnormal;
  else out.exit_code = out.report.passed ? exit_ok : exit_checks_failed;
  return out;
}

int run_experiment(const Config& cfg, const fs::path& out_dir, std::ostream& log) {
  Plan plan;
  ScalarField u0;
  try {
    plan = make_plan(cfg, &u0);
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_for(e);
  }
  const RunOutcome out = execute(plan, u0);
  write_artifacts(plan, out, out_dir);
  log << "experiment " << cfg.name << ": " << to_string(out.trajectory.termination) << " after "
      << out.trajectory.steps << " steps\n";
  if (!out.trajectory.message.empty()) log << out.trajectory.message << "\n";
  print_report(out.report, log);
  return out.exit_code;
}

int verify_directory(const fs::path& dir, std::ostream& log) {
  Plan plan;
  Trajectory traj;
  try {
    const Config cfg = parse_config(io::read_text(dir / "config.echo"));
    plan = make_plan(cfg, nullptr);
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_for(e);
  }
  traj.grid = plan.grid;
  traj.params = plan.params;
  traj.ctx = plan.ctx;
  traj.rescaled = plan.rescaled;
  traj.samples = io::parse_timeseries(io::read_text(dir / "timeseries.csv"));
  io::parse_status(io::read_text(dir / "run.status"), traj);
  for (std::size_t k = 0;; ++k) {
    const fs::path p = dir / ("snap_" + std::to_string(k) + ".csv");
    if (!fs::exists(p)) break;
    traj.snapshots.push_back(io::parse_snapshot(io::read_text(p), plan.grid));
  }
  const EstimateReport rep = verify_trajectory(traj, plan.verify, plan.checks, plan.config.name);
  print_report(rep, log);
  const std::string regenerated = io::report_json(rep);
  const fs::path stored = dir / "report.json";
  if (fs::exists(stored) && io::read_text(stored) != regenerated) {
    log << "report.json NOT reproduced\n";
    return exit_checks_failed;
  }
  log << "report.json reproduced\n";
  if (traj.termination != Termination::reached_end) return exit_abnormal;
  return rep.passed ? exit_ok : exit_checks_failed;
}

double observed_order(double e0, double e1, double h0, double h1) {
  return std::log(e0 / e1) / std::log(h0 / h1);
}

int convergence_study(const Config& cfg, const std::vector<int>& grids, const fs::path& out_dir,
                      std::ostream& log) {
  if (grids.size() < 3) {
    log << "error: need >= 3 grids\n";
    return exit_config;
  }
  struct Level {
    int n = 0;
    double h = 0.0;
    ScalarField u_final;
    double h_discrepancy = 0.0;
    double area_residual = 0.0;
    double final_u_exact_error = 0.0;
    CapGrid grid;
  };
  std::vector<Level> levels;
  std::vector<int> sorted = grids;
  std::sort(sorted.begin(), sorted.end());
  int code = exit_ok;
  for (int n : sorted) {
    Config c = cfg;
    c.n_theta = n;
    Plan plan;
    ScalarField u0;
    try {
      plan = make_plan(c, &u0);
    } catch (const Error& e) {
      log << "error: " << e.what() << "\n";
      return exit_for(e);
    }
    const RunOutcome out = execute(plan, u0);
    write_artifacts(plan, out, out_dir / ("n_theta_" + std::to_string(n)));
    if (out.exit_code != exit_ok) code = std::max(code, out.exit_code);
    Level lv;
    lv.n = n;
    lv.h = plan.grid.h_theta();
    lv.grid = plan.grid;
    lv.u_final = out.trajectory.snapshots.back().u;
    GeometryOptions go;
    go.alpha = cfg.alpha;
    go.enforce_mean_convexity = false;
    const GraphGeometry geo = graph_geometry(u0, plan.grid, go);
    const OracleGeometry orc = embedding_oracle(u0, plan.grid);
    for (std::size_t i = 0; i < plan.grid.size(); ++i) {
      lv.h_discrepancy = std::max(lv.h_discrepancy, std::abs(geo.mean_curv[i] - orc.mean_curv[i]));
    }
    lv.area_residual = area_law_residual(out.trajectory);
    const double t_final = out.trajectory.snapshots.back().t;
    const double exact = theta(t_final, RescaleContext{cfg.alpha, cfg.n_dim, std::log(cfg.initial.r0)});
    for (double u : lv.u_final.values) {
      lv.final_u_exact_error = std::max(lv.final_u_exact_error, std::abs(u - exact) / exact);
    }
    levels.push_back(std::move(lv));
    log << "n_theta = " << n << ": exit " << out.exit_code << "\n";
  }

  const bool constant = cfg.initial.eps == 0.0;
  std::string csv = "quantity,n_theta,h,error,observed_order,flag\n";
  auto emit = [&](const std::string& q, const std::vector<double>& err, bool time_dominated) {
    for (std::size_t i = 0; i < err.size(); ++i) {
      std::string order, flag;
      if (time_dominated) flag = "time-dominated";
      if (i > 0) {
        const double o = observed_order(err[i - 1], err[i], levels[i - 1].h, levels[i].h);
        order = io::format_double(o);
        if (flag.empty()) flag = std::abs(o - 2.0) <= 0.2 ? "ok" : "off-order";
      }
      // relative errors of O(1) quantities; below this FD round-off dominates
      if (err[i] < 1e-10 && !time_dominated) flag = "round-off";
      csv += q + "," + std::to_string(levels[i].n) + "," + io::format_double(levels[i].h) + "," +
             io::format_double(err[i]) + "," + order + "," + flag + "\n";
    }
  };

  std::vector<double> e_final;
  if (constant) {
    for (const Level& lv : levels) e_final.push_back(lv.final_u_exact_error);
  } else {
    // self-convergence against the next finer nested grid
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
      const Level& a = levels[i];
      const Level& b = levels[i + 1];
      if ((b.n - 1) % (a.n - 1) != 0) {
        log << "error: grids must be nested for self-convergence\n";
        return exit_config;
      }
      const int r = (b.n - 1) / (a.n - 1);
      double e = 0.0;
      for (std::size_t idx = 0; idx < a.grid.size(); ++idx) {
        const std::size_t jdx = b.grid.index(a.grid.ring(idx) * r, a.grid.column(idx));
        e = std::max(e, std::abs(a.u_final[idx] - b.u_final[jdx]));
      }
      e_final.push_back(e);
    }
  }
  emit("final_u", e_final, constant);
  std::vector<double> e_h, e_area;
  for (const Level& lv : levels) {
    e_h.push_back(lv.h_discrepancy);
    e_area.push_back(lv.area_residual);
  }
  emit("H_oracle", e_h, false);
  emit("area_law", e_area, false);
  fs::create_directories(out_dir);
  io::write_text(out_dir / "orders.csv", csv);
  log << csv;
  return code;
}

}  // namespace icf
