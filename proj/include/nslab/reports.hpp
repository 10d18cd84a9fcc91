#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "nslab/momentum.hpp"

namespace nslab {

using Json = nlohmann::json;

// Deterministic double formatting (%.17g) for all CSV output.
std::string fmt_double(double x);

// Columnar trajectory format, one record per stored step. Header comments
// name the grid shape and scheme metadata; columns are
//   t, step, inflow_acc, outflow_acc, k_prev, z_prev, rho_<i>..., u<b>_<i>...
// where k_prev/z_prev are the per-step divergence norm and quartic-flux
// norm of the step leading to the record (0 for the initial record).
void save_trajectory_csv(const Trajectory& traj, const std::string& path);

// Reads the fields and accumulators back into a trajectory whose
// environment (domain, partition, extension, law, viscosity) has already
// been reconstructed from the run configuration.
void load_trajectory_csv(Trajectory& traj, const std::string& path);

void save_runlog_csv(const Trajectory& traj, const std::string& path);

void write_json(const Json& j, const std::string& path);

// FNV-1a 64-bit content hash, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

struct RunManifest {
  std::string config_hash;
  std::string code_version;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> artifacts;
  std::vector<std::pair<std::string, std::string>> statuses;  // audit, PASS/FAIL
  bool all_pass = true;
};

void write_manifest(const RunManifest& m, const std::string& path);

}  // namespace nslab
