// icflow: run, replay and convergence-study driver.
//
//   icflow run <config> [--out-dir DIR] [--override section.key=value ...]
//   icflow verify <run-dir>
//   icflow study <config> --grids 51,101,201 [--out-dir DIR]

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icf/experiment.hpp"

namespace {

std::vector<int> parse_grids(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const int n = std::stoi(item, &used);
    if (used != item.size()) throw icf::Error(icf::ErrorKind::config_value, "bad grid '" + item + "'");
    out.push_back(n);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse curvature flow of star-shaped graphs in a cone: simulate and verify"};
  app.require_subcommand(1);

  std::string config_path, run_dir, out_dir, grids;
  std::vector<std::string> overrides;
  long seed = 0;

  auto* run = app.add_subcommand("run", "integrate the flow and verify the estimates");
  run->add_option("config", config_path, "configuration file")->required();
  run->add_option("--out-dir", out_dir, "output directory (default: output.out_dir)");
  run->add_option("--override", overrides, "section.key=value, repeatable");
  run->add_option("--seed", seed, "reserved; runs are deterministic");

  auto* verify = app.add_subcommand("verify", "re-verify a run directory from its files");
  verify->add_option("dir", run_dir, "run directory")->required();

  auto* study = app.add_subcommand("study", "convergence study over several n_theta");
  study->add_option("config", config_path, "configuration file")->required();
  study->add_option("--grids", grids, "comma separated n_theta list")->required();
  study->add_option("--out-dir", out_dir, "output directory (default: output.out_dir)");
  study->add_option("--override", overrides, "section.key=value, repeatable");
  study->add_option("--seed", seed, "reserved; runs are deterministic");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) return icf::verify_directory(run_dir, std::cout);
    const icf::Config cfg = icf::load_config(config_path, overrides);
    const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
    if (*run) return icf::run_experiment(cfg, dir, std::cout);
    return icf::convergence_study(cfg, parse_grids(grids), dir, std::cout);
  } catch (const icf::Error& e) {
    std::cerr << "error (" << icf::to_string(e.kind()) << "): " << e.what() << "\n";
    switch (e.kind()) {
      case icf::ErrorKind::config_syntax:
      case icf::ErrorKind::config_value:
      case icf::ErrorKind::io:
        return icf::exit_config;
      default:
        return icf::exit_abnormal;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return icf::exit_abnormal;
  }
}
