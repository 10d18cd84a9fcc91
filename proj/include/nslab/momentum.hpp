#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nslab/grid.hpp"
#include "nslab/thermo.hpp"
#include "nslab/transport.hpp"

namespace nslab {

struct ViscosityParams {
  double mu = 1.0;      // > 0
  double lambda = 0.0;  // >= 0

  void validate() const {
    if (!(mu > 0.0)) throw ConfigError("shear viscosity mu must be positive");
    if (lambda < 0.0) throw ConfigError("bulk parameter lambda must be nonnegative");
  }
};

using ForcingSampler = std::function<Vec2(double, const Vec2&)>;

struct MomentumStepConfig {
  double epsilon = 0.0;  // shared with the transport step
  double dt = 0.0;
  ViscosityParams viscosity;
  ForcingSampler forcing;  // optional; empty means no external force
};

// Newtonian stress mu (G + G^T) + lambda tr(G) I applied to a velocity
// gradient tensor field (row i holds d_a u_b at (a*dim+b)).
TensorField stress(const TensorField& grad_u, int dim, const ViscosityParams& visc);

// Pointwise S(G):H contraction per cell.
Field stress_contract(const TensorField& grad_u, const TensorField& grad_w, int dim,
                      const ViscosityParams& visc);

// Discrete viscous pairing sum S(grad u) : grad w * vol realized as
//   mu * sum_faces (Du.Dw) + (mu+lambda) * sum_cells div_c(u) div_c(w) * vol
// for w vanishing on the boundary cell layer. This is the quadratic form of
// the implicit solve; with w = u it dominates mu * ||grad u||^2 exactly.
double stress_pairing(const Domain& domain, const VecField& u, const VecField& w,
                      const ViscosityParams& visc);

// Quartic dissipation flux Z = eps |grad v|^2 grad v per cell, and its
// L^{4/3} space norm.
struct QuarticFlux {
  TensorField z;
  double norm_43 = 0.0;  // ( sum |Z|^{4/3} vol )^{3/4}
};
QuarticFlux quartic_flux(const Domain& domain, const VecField& v, double epsilon);

// Semi-implicit momentum step: explicit upwind convection, pressure
// gradient, eps-compensation, quartic term and forcing; implicit viscous
// stress; strong Dirichlet u = u_inf on the boundary cell layer.
VecField step_momentum(const Field& rho_old, const VecField& u_old,
                       const Field& rho_new, const Domain& domain,
                       const ExtensionField& ext, const PressureLaw& law,
                       const MomentumStepConfig& cfg, double t = 0.0);

// Per-step diagnostics appended to the run log.
struct RunLogRow {
  double t = 0.0;
  double mass = 0.0;
  double kinetic = 0.0;
  double helmholtz = 0.0;
  double z_norm = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
};

// Time-indexed sequence of states plus the step metadata and the exact
// per-step accumulators the audits rely on.
struct Trajectory {
  Domain domain;
  BoundaryPartition partition;
  ExtensionField ext;
  PressureLaw law = PressureLaw::power(1.0, 2.0);
  ViscosityParams viscosity;
  double epsilon = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  double dt = 0.0;
  ForcingSampler forcing;

  std::vector<double> times;       // stored times, strictly increasing
  std::vector<int> step_index;     // solver step number of each stored state
  std::vector<Field> rho;          // per stored time
  std::vector<VecField> u;         // per stored time
  std::vector<double> inflow_acc;  // solver-accumulated boundary integrals
  std::vector<double> outflow_acc;
  std::vector<double> k_history;   // per solver step: max |div_h u|
  std::vector<double> z_norm_history;  // per solver step: ||Z||_{4/3} in space
  std::vector<RunLogRow> runlog;

  int steps() const { return static_cast<int>(times.size()); }
  VecField v_at(int n) const {  // u - u_inf
    return u[n] - ext.u_inf;
  }
  int index_of_time(double tau, double tol = 1e-9) const;
  bool every_step_stored() const { return store_cadence == 1; }
  int store_cadence = 1;
};

struct SimCase {
  Domain domain;
  BoundaryPartition partition;
  ExtensionField ext;
  PressureLaw law = PressureLaw::power(1.0, 2.0);
  ViscosityParams viscosity;
  double epsilon = 0.0;
  double dt = 0.0;
  double t_end = 0.0;
  int cadence = 1;  // store every n-th step (initial state always stored)
  Field rho0;
  VecField u0;
  ForcingSampler forcing;
};

// Alternates continuity and momentum steps, records diagnostics, enforces
// the coupling floor from the discrete maximum principle.
Trajectory run_simulation(const SimCase& sim);

}  // namespace nslab
