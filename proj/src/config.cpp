#include "icf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace icf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::config_value, key + ": " + why);
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad_value(key, "expected an integer");
  return out;
}

double parse_num(const std::string& key, const std::string& v) {
  try {
    return parse_number(v);
  } catch (const Error& e) {
    bad_value(key, e.what());
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  bad_value(key, "expected true or false");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

using Setter = std::function<void(Config&, const std::string& key, const std::string& value)>;

Setter num_field(double Config::*field) {
  return [field](Config& c, const std::string& k, const std::string& v) {
    c.*field = parse_num(k, v);
  };
}
Setter int_field(int Config::*field) {
  return [field](Config& c, const std::string& k, const std::string& v) {
    c.*field = parse_int(k, v);
  };
}
Setter verify_field(double VerifyOptions::*field) {
  return [field](Config& c, const std::string& k, const std::string& v) {
    c.verify.*field = parse_num(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["name"] = [](Config& c, const std::string& k, const std::string& v) {
      if (v.empty()) bad_value(k, "must not be empty");
      c.name = v;
    };
    t["grid.n_dim"] = int_field(&Config::n_dim);
    t["grid.theta_max"] = num_field(&Config::theta_max);
    t["grid.mode"] = [](Config& c, const std::string& k, const std::string& v) {
      if (v == "axisymmetric") c.mode = GridMode::axisymmetric;
      else if (v == "full2d") c.mode = GridMode::full2d;
      else bad_value(k, "expected axisymmetric or full2d");
    };
    t["grid.n_theta"] = int_field(&Config::n_theta);
    t["grid.n_psi"] = int_field(&Config::n_psi);

    t["flow.alpha"] = num_field(&Config::alpha);
    t["flow.t_end"] = [](Config& c, const std::string& k, const std::string& v) {
      c.t_end = parse_num(k, v);
      c.s_end.reset();
    };
    t["flow.s_end"] = [](Config& c, const std::string& k, const std::string& v) {
      c.s_end = parse_num(k, v);
      c.t_end.reset();
    };
    t["flow.time_variable"] = [](Config& c, const std::string& k, const std::string& v) {
      if (v == "t") c.time_variable = TimeVariable::t;
      else if (v == "s") c.time_variable = TimeVariable::s;
      else bad_value(k, "expected t or s");
    };
    t["flow.stepper"] = [](Config& c, const std::string& k, const std::string& v) {
      if (v == "rk4") c.stepper = Stepper::rk4;
      else if (v == "euler") c.stepper = Stepper::euler;
      else bad_value(k, "expected rk4 or euler");
    };
    t["flow.cfl_safety"] = num_field(&Config::cfl_safety);
    t["flow.eps_mc"] = num_field(&Config::eps_mc);
    t["flow.parallel"] = [](Config& c, const std::string& k, const std::string& v) {
      c.parallel = parse_bool(k, v);
    };

    t["initial.r0"] = [](Config& c, const std::string& k, const std::string& v) {
      c.initial.r0 = parse_num(k, v);
    };
    t["initial.eps"] = [](Config& c, const std::string& k, const std::string& v) {
      c.initial.eps = parse_num(k, v);
    };
    t["initial.k_radial"] = [](Config& c, const std::string& k, const std::string& v) {
      c.initial.k_radial = parse_int(k, v);
    };
    t["initial.m_angular"] = [](Config& c, const std::string& k, const std::string& v) {
      c.initial.m_angular = parse_int(k, v);
    };

    t["rescale.c"] = [](Config& c, const std::string& k, const std::string& v) {
      if (v == "midpoint") c.c.reset();
      else c.c = parse_num(k, v);
    };

    t["output.out_dir"] = [](Config& c, const std::string& k, const std::string& v) {
      if (v.empty()) bad_value(k, "must not be empty");
      c.out_dir = v;
    };
    t["output.record_every"] = int_field(&Config::record_every);
    t["output.snapshot_times"] = [](Config& c, const std::string& k, const std::string& v) {
      c.snapshot_times.clear();
      for (const std::string& item : split_list(v)) c.snapshot_times.push_back(parse_num(k, item));
    };
    t["output.snapshot_count"] = int_field(&Config::snapshot_count);

    t["verify.checks"] = [](Config& c, const std::string& k, const std::string& v) {
      c.checks.clear();
      if (v == "all") return;
      for (const std::string& item : split_list(v)) {
        const auto& names = check_names();
        if (std::find(names.begin(), names.end(), item) == names.end()) {
          bad_value(k, "unknown check '" + item + "'");
        }
        c.checks.push_back(item);
      }
      if (c.checks.empty()) bad_value(k, "nothing verified");
    };
    t["verify.identity_fraction"] = num_field(&Config::identity_fraction);
    t["verify.identity_delta"] = num_field(&Config::identity_delta);
    t["verify.identity_C"] = [](Config& c, const std::string& k, const std::string& v) {
      c.verify.identities.C = parse_num(k, v);
    };
    t["verify.identity_phi_scale"] = [](Config& c, const std::string& k, const std::string& v) {
      c.verify.identities.phi_scale = parse_num(k, v);
    };
    t["verify.c0_C"] = verify_field(&VerifyOptions::c0_C);
    t["verify.phidot_C"] = verify_field(&VerifyOptions::phidot_C);
    t["verify.grad_tau"] = verify_field(&VerifyOptions::grad_tau);
    t["verify.grad_tau_step"] = verify_field(&VerifyOptions::grad_tau_step);
    t["verify.H_C"] = verify_field(&VerifyOptions::H_C);
    t["verify.H_band_scale"] = verify_field(&VerifyOptions::H_band_scale);
    t["verify.area_C"] = verify_field(&VerifyOptions::area_C);
    t["verify.area_floor"] = verify_field(&VerifyOptions::area_floor);
    t["verify.holder_beta"] = verify_field(&VerifyOptions::holder_beta);
    t["verify.holder_radius"] = verify_field(&VerifyOptions::holder_radius);
    t["verify.holder_growth"] = verify_field(&VerifyOptions::holder_growth);
    t["verify.holder_floor"] = verify_field(&VerifyOptions::holder_floor);
    t["verify.decay_burn_in"] = verify_field(&VerifyOptions::decay_burn_in);
    t["verify.decay_r2_min"] = verify_field(&VerifyOptions::decay_r2_min);
    t["verify.decay_noise"] = verify_field(&VerifyOptions::decay_noise);
    t["verify.radius_C"] = verify_field(&VerifyOptions::radius_C);
    t["verify.roundness"] = verify_field(&VerifyOptions::roundness);
    t["verify.radius_grad"] = verify_field(&VerifyOptions::radius_grad);
    return t;
  }();
  return table;
}

void validate(const Config& c) {
  if (c.n_dim < 2) bad_value("grid.n_dim", "must be >= 2");
  if (!(c.theta_max > 0.0)) bad_value("grid.theta_max", "must be positive");
  if (c.theta_max > 0.5 * std::numbers::pi * (1.0 + 1e-14)) {
    bad_value("grid.theta_max", "cone not convex (theta_max must not exceed pi/2)");
  }
  if (c.n_theta < 4) bad_value("grid.n_theta", "must be >= 4");
  if (c.mode == GridMode::full2d) {
    if (c.n_dim != 2) bad_value("grid.mode", "full2d requires n_dim = 2");
    if (c.n_psi < 8 || c.n_psi % 4 != 0) bad_value("grid.n_psi", "must be >= 8 and a multiple of 4");
  }
  if (!(c.alpha >= 0.0)) bad_value("flow.alpha", "must be >= 0");
  if (c.t_end && !(*c.t_end > 0.0)) bad_value("flow.t_end", "must be positive");
  if (c.s_end && !(*c.s_end > 0.0)) bad_value("flow.s_end", "must be positive");
  if (!(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0)) bad_value("flow.cfl_safety", "must lie in (0, 1]");
  if (!(c.eps_mc > 0.0)) bad_value("flow.eps_mc", "must be positive");
  if (!(c.initial.r0 > 0.0)) bad_value("initial.r0", "must be positive");
  if (c.initial.k_radial < 0) bad_value("initial.k_radial", "must be >= 0");
  if (c.initial.m_angular < 0) bad_value("initial.m_angular", "must be >= 0");
  if (c.record_every < 1) bad_value("output.record_every", "must be >= 1");
  if (c.snapshot_count < 0) bad_value("output.snapshot_count", "must be >= 0");
  for (double t : c.snapshot_times) {
    if (!(t > 0.0)) bad_value("output.snapshot_times", "entries must be positive");
  }
  if (!(c.identity_fraction > 0.0 && c.identity_fraction < 1.0)) {
    bad_value("verify.identity_fraction", "must lie in (0, 1)");
  }
  if (!(c.identity_delta > 0.0 && c.identity_delta < 0.25)) {
    bad_value("verify.identity_delta", "must lie in (0, 0.25)");
  }
  if (!(c.verify.decay_r2_min > 0.0 && c.verify.decay_r2_min <= 1.0)) {
    bad_value("verify.decay_r2_min", "must lie in (0, 1]");
  }
}

void apply(Config& cfg, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw Error(ErrorKind::config_value, "unknown key '" + key + "'");
  it->second(cfg, key, value);
}

}  // namespace

double parse_number(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw Error(ErrorKind::config_value, "empty number");
  double value = 1.0;
  char op = '*';
  std::size_t pos = 0;
  while (true) {
    std::size_t end = s.find_first_of("*/", pos);
    // an exponent sign never contains * or /, so factors split cleanly
    const std::string tok = trim(s.substr(pos, end == std::string::npos ? std::string::npos : end - pos));
    double f = 0.0;
    if (tok == "pi") {
      f = std::numbers::pi;
    } else if (tok == "-pi") {
      f = -std::numbers::pi;
    } else {
      const char* first = tok.data();
      const char* last = tok.data() + tok.size();
      if (first != last && *first == '+') ++first;
      const auto res = std::from_chars(first, last, f);
      if (tok.empty() || res.ec != std::errc() || res.ptr != last) {
        throw Error(ErrorKind::config_value, "cannot parse number '" + s + "'");
      }
    }
    value = op == '*' ? value * f : value / f;
    if (end == std::string::npos) break;
    op = s[end];
    pos = end + 1;
  }
  if (!std::isfinite(value)) throw Error(ErrorKind::config_value, "non-finite number '" + s + "'");
  return value;
}

Config parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::map<std::string, int> seen;
  int lineno = 0;
  const std::vector<std::string> sections = {"grid", "flow", "initial", "rescale", "output",
                                             "verify"};
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw Error(ErrorKind::config_syntax, where + ": unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
        throw Error(ErrorKind::config_value, where + ": unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::config_syntax, where + ": expected 'key = value'");
    }
    const std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    const auto hash = value.find(" #");
    if (hash != std::string::npos) value = trim(value.substr(0, hash));
    if (key.empty()) throw Error(ErrorKind::config_syntax, where + ": missing key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (seen.count(full)) {
      throw Error(ErrorKind::config_syntax, where + ": duplicate key '" + full + "'");
    }
    seen[full] = lineno;
    try {
      apply(cfg, full, value);
    } catch (const Error& e) {
      throw Error(e.kind(), where + ": " + e.what());
    }
  }
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::config_syntax, "override '" + ov + "': expected section.key=value");
    }
    apply(cfg, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
  }
  validate(cfg);
  return cfg;
}

Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string echo_config(const Config& c) {
  std::ostringstream o;
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
  };
  o << "name = " << c.name << "\n\n";
  o << "[grid]\n";
  o << "n_dim = " << c.n_dim << "\n";
  o << "theta_max = " << fmt(c.theta_max) << "\n";
  o << "mode = " << (c.mode == GridMode::full2d ? "full2d" : "axisymmetric") << "\n";
  o << "n_theta = " << c.n_theta << "\n";
  o << "n_psi = " << c.n_psi << "\n\n";
  o << "[flow]\n";
  o << "alpha = " << fmt(c.alpha) << "\n";
  if (c.s_end) o << "s_end = " << fmt(*c.s_end) << "\n";
  else o << "t_end = " << fmt(c.t_end.value_or(1.0)) << "\n";
  o << "time_variable = " << (c.time_variable == TimeVariable::s ? "s" : "t") << "\n";
  o << "stepper = " << to_string(c.stepper) << "\n";
  o << "cfl_safety = " << fmt(c.cfl_safety) << "\n";
  o << "eps_mc = " << fmt(c.eps_mc) << "\n";
  o << "parallel = " << (c.parallel ? "true" : "false") << "\n\n";
  o << "[initial]\n";
  o << "r0 = " << fmt(c.initial.r0) << "\n";
  o << "eps = " << fmt(c.initial.eps) << "\n";
  o << "k_radial = " << c.initial.k_radial << "\n";
  o << "m_angular = " << c.initial.m_angular << "\n\n";
  o << "[rescale]\n";
  o << "c = " << (c.c ? fmt(*c.c) : "midpoint") << "\n\n";
  o << "[output]\n";
  o << "out_dir = " << c.out_dir << "\n";
  o << "record_every = " << c.record_every << "\n";
  if (!c.snapshot_times.empty()) o << "snapshot_times = " << list(c.snapshot_times) << "\n";
  o << "snapshot_count = " << c.snapshot_count << "\n\n";
  o << "[verify]\n";
  if (c.checks.empty()) {
    o << "checks = all\n";
  } else {
    o << "checks = ";
    for (std::size_t i = 0; i < c.checks.size(); ++i) o << (i ? ", " : "") << c.checks[i];
    o << "\n";
  }
  const VerifyOptions& v = c.verify;
  o << "identity_fraction = " << fmt(c.identity_fraction) << "\n";
  o << "identity_delta = " << fmt(c.identity_delta) << "\n";
  o << "identity_C = " << fmt(v.identities.C) << "\n";
  o << "identity_phi_scale = " << fmt(v.identities.phi_scale) << "\n";
  o << "c0_C = " << fmt(v.c0_C) << "\n";
  o << "phidot_C = " << fmt(v.phidot_C) << "\n";
  o << "grad_tau = " << fmt(v.grad_tau) << "\n";
  o << "grad_tau_step = " << fmt(v.grad_tau_step) << "\n";
  o << "H_C = " << fmt(v.H_C) << "\n";
  o << "H_band_scale = " << fmt(v.H_band_scale) << "\n";
  o << "area_C = " << fmt(v.area_C) << "\n";
  o << "area_floor = " << fmt(v.area_floor) << "\n";
  o << "holder_beta = " << fmt(v.holder_beta) << "\n";
  o << "holder_radius = " << fmt(v.holder_radius) << "\n";
  o << "holder_growth = " << fmt(v.holder_growth) << "\n";
  o << "holder_floor = " << fmt(v.holder_floor) << "\n";
  o << "decay_burn_in = " << fmt(v.decay_burn_in) << "\n";
  o << "decay_r2_min = " << fmt(v.decay_r2_min) << "\n";
  o << "decay_noise = " << fmt(v.decay_noise) << "\n";
  o << "radius_C = " << fmt(v.radius_C) << "\n";
  o << "roundness = " << fmt(v.roundness) << "\n";
  o << "radius_grad = " << fmt(v.radius_grad) << "\n";
  return o.str();
}

}  // namespace icf
