#include "icf/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace icf::io {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double x = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() || res.ptr != last) {
    throw Error(ErrorKind::io, "malformed number '" + text + "'");
  }
  return x;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed for '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(line);
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::string header_value(const std::string& line, const std::string& key) {
  const std::string prefix = "# " + key + " = ";
  if (line.rfind(prefix, 0) != 0) {
    throw Error(ErrorKind::io, "snapshot header: expected '" + key + "'");
  }
  return line.substr(prefix.size());
}

}  // namespace

std::string timeseries_csv(const std::vector<Sample>& samples) {
  std::string out;
  const auto& names = sample_column_names();
  for (std::size_t c = 0; c < names.size(); ++c) out += (c ? "," : "") + names[c];
  out += "\n";
  for (const Sample& s : samples) {
    const std::vector<double> v = sample_values(s);
    for (std::size_t c = 0; c < v.size(); ++c) {
      if (c) out += ',';
      out += format_double(v[c]);
    }
    out += "\n";
  }
  return out;
}

std::vector<Sample> parse_timeseries(const std::string& text) {
  const auto ls = lines(text);
  if (ls.empty()) throw Error(ErrorKind::io, "timeseries: empty file");
  const auto header = split(ls[0], ',');
  if (header != sample_column_names()) throw Error(ErrorKind::io, "timeseries: unexpected header");
  std::vector<Sample> out;
  for (std::size_t k = 1; k < ls.size(); ++k) {
    const auto cells = split(ls[k], ',');
    if (cells.size() != sample_columns) {
      throw Error(ErrorKind::io, "timeseries: row " + std::to_string(k) + " has wrong width");
    }
    std::vector<double> v;
    for (const auto& c : cells) v.push_back(parse_double(c));
    out.push_back(sample_from_values(v));
  }
  return out;
}

std::string snapshot_csv(const Snapshot& snap, const CapGrid& grid) {
  const bool full = grid.mode() == GridMode::full2d;
  std::string out;
  out += "# n_dim = " + std::to_string(grid.n_dim()) + "\n";
  out += "# theta_max = " + format_double(grid.theta_max()) + "\n";
  out += std::string("# mode = ") + (full ? "full2d" : "axisymmetric") + "\n";
  out += "# t = " + format_double(snap.t) + "\n";
  out += "# s = " + format_double(snap.s) + "\n";
  out += full ? "theta,psi,u\n" : "theta,u\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out += format_double(grid.theta(i));
    if (full) out += "," + format_double(grid.psi(i));
    out += "," + format_double(snap.u[i]) + "\n";
  }
  return out;
}

Snapshot parse_snapshot(const std::string& text, const CapGrid& grid) {
  const auto ls = lines(text);
  if (ls.size() < 6) throw Error(ErrorKind::io, "snapshot: truncated file");
  const bool full = grid.mode() == GridMode::full2d;
  if (std::stoi(header_value(ls[0], "n_dim")) != grid.n_dim() ||
      header_value(ls[2], "mode") != (full ? "full2d" : "axisymmetric")) {
    throw Error(ErrorKind::grid_mismatch, "snapshot does not match the configured grid");
  }
  Snapshot snap;
  snap.t = parse_double(header_value(ls[3], "t"));
  snap.s = parse_double(header_value(ls[4], "s"));
  if (ls.size() != 6 + grid.size()) throw Error(ErrorKind::grid_mismatch, "snapshot node count");
  snap.u.grid_id = grid.id();
  snap.u.neumann = true;
  snap.u.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto cells = split(ls[6 + i], ',');
    if (cells.size() != (full ? 3u : 2u)) throw Error(ErrorKind::io, "snapshot: malformed row");
    snap.u.values[i] = parse_double(cells.back());
  }
  return snap;
}

std::string report_json(const EstimateReport& rep) {
  using json = nlohmann::ordered_json;
  json j;
  j["name"] = rep.name;
  j["passed"] = rep.passed;
  j["termination"] = std::string(to_string(rep.termination));
  j["termination_message"] = rep.termination_message;
  j["grid"] = {{"n_dim", rep.grid.n_dim()},
               {"theta_max", rep.grid.theta_max()},
               {"mode", rep.grid.mode() == GridMode::full2d ? "full2d" : "axisymmetric"},
               {"n_theta", rep.grid.n_theta()},
               {"n_psi", rep.grid.n_psi()},
               {"h_theta", rep.grid.h_theta()}};
  j["params"] = {{"alpha", rep.params.alpha},
                 {"cfl_safety", rep.params.cfl_safety},
                 {"end", rep.params.t_end},
                 {"time_variable", rep.rescaled ? "s" : "t"},
                 {"stepper", std::string(to_string(rep.params.stepper))},
                 {"eps_mc", rep.params.eps_mc},
                 {"record_every", rep.params.record_every}};
  j["rescale"] = {{"alpha", rep.ctx.alpha}, {"n_dim", rep.ctx.n_dim}, {"c", rep.ctx.c}};
  const DerivedConstants& k = rep.constants;
  j["constants"] = {{"phi1", k.phi1},       {"phi2", k.phi2},
                    {"c1", k.c1},           {"c2", k.c2},
                    {"m1", k.m1},           {"m2", k.m2},
                    {"v_max", k.v_max},     {"c3", k.c3},
                    {"c4", k.c4},           {"lambda_fit", k.lambda_fit},
                    {"r2_fit", k.r2_fit},   {"r_inf", k.r_inf},
                    {"radius_lower", k.radius_lower}, {"radius_upper", k.radius_upper}};
  json checks = json::array();
  for (const CheckResult& c : rep.checks) {
    json e;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["margin"] = c.margin;
    e["tolerance"] = c.tolerance;
    e["worst_time"] = c.worst_time;
    if (c.worst_node == no_node) e["worst_node"] = nullptr;
    else e["worst_node"] = c.worst_node;
    e["details"] = c.details;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  return j.dump(2) + "\n";
}

std::string status_text(const Trajectory& traj) {
  return std::string(to_string(traj.termination)) + "\n" + traj.message + "\n";
}

void parse_status(const std::string& text, Trajectory& traj) {
  std::stringstream ss(text);
  std::string name, message;
  std::getline(ss, name);
  std::getline(ss, message);
  if (name == "reached_end") traj.termination = Termination::reached_end;
  else if (name == "mean_convexity_lost") traj.termination = Termination::mean_convexity_lost;
  else if (name == "blowup_detected") traj.termination = Termination::blowup_detected;
  else throw Error(ErrorKind::io, "run.status: unknown termination '" + name + "'");
  traj.message = message;
}

}  // namespace icf::io
