#pragma once

#include <string>
#include <vector>

#include "nslab/momentum.hpp"
#include "nslab/samplers.hpp"
#include "nslab/thermo.hpp"

namespace nslab {

// One structured-text file fully determines a run. Sections and keys are
// documented in docs/config.md; unknown keys are rejected with their
// location.
struct RunConfig {
  // [run]
  std::string mode = "simulate";  // simulate|audit|ws|probe|sweep|constants
  std::string out_dir = "out";
  unsigned long long seed = 0;
  int workers = 1;

  // [domain]
  DomainConfig domain;

  // [boundary]
  std::vector<SamplerSpec> boundary_u;  // one per dimension
  SamplerSpec boundary_rho;
  bool has_boundary_rho = false;

  // [law]
  std::string law_kind = "power";
  double law_a = 1.0;
  double law_gamma = 2.0;
  double pert_amp = 0.0, pert_center = 1.0, pert_width = 0.5;

  // [fluid]
  ViscosityParams viscosity;

  // [scheme]
  double epsilon = 0.0;
  double delta = 0.0;
  double beta = 0.0;

  // [time]
  double dt = 0.0;   // 0 -> derived from cfl
  double cfl = 0.5;
  double t_end = 0.5;
  int cadence = 0;   // 0 -> mode default (1 for audit-style, 10 otherwise)

  // [initial]
  SamplerSpec init_rho{"constant", {1.0}};
  std::vector<SamplerSpec> init_u;

  // [extension]
  double collar = 0.0;  // 0 -> max(0.1 extent, 2.05 spacing)

  // [audit]
  std::vector<std::string> audits;  // empty -> full default set

  // [ws]
  std::string ws_case = "uniform";
  double ws_param_a = 1.0, ws_param_b = 1.0;
  std::string ws_perturb = "rho0";
  std::vector<double> ws_etas{0.0};

  // [probe]
  std::vector<double> probe_h;
  double probe_alpha = 0.0, probe_kappa = 0.0;

  // [sweep]
  std::vector<double> sweep_epsilon;
  std::vector<double> sweep_delta;
  std::vector<int> sweep_cells;

  // [constants]
  double const_a = 1.0, const_b = 2.0;
  ConstantGrid const_grid;

  std::string source_text;  // raw file contents (hashed into the manifest)
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// Effective pressure law: [law] base wrapped by the [scheme] artificial
// pressure when delta > 0 (validates beta > max{gamma, 9/2}).
PressureLaw make_law(const RunConfig& cfg);

// Assembled simulation case (domain, partition, extension, law, data, dt).
SimCase make_sim_case(const RunConfig& cfg);

}  // namespace nslab
