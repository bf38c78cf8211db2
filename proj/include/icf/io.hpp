#pragma once

// CSV / JSON artifacts. Every float is written as the shortest decimal that
// round-trips to the same double (std::to_chars), so reruns are byte-identical
// and reading a file back recovers the exact values.

#include <filesystem>
#include <string>
#include <vector>

#include "icf/flow.hpp"
#include "icf/verifier.hpp"

namespace icf::io {

std::string format_double(double x);
double parse_double(const std::string& text);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

std::string timeseries_csv(const std::vector<Sample>& samples);
std::vector<Sample> parse_timeseries(const std::string& text);

/// Header lines "# key = value" (n_dim, theta_max, mode, t, s), then a
/// "theta,u" or "theta,psi,u" header row and one row per node.
std::string snapshot_csv(const Snapshot& snap, const CapGrid& grid);
Snapshot parse_snapshot(const std::string& text, const CapGrid& grid);

std::string report_json(const EstimateReport& report);

/// Two lines: termination name, message.
std::string status_text(const Trajectory& traj);
void parse_status(const std::string& text, Trajectory& traj);

}  // namespace icf::io
