#pragma once

#include <vector>

#include "nslab/grid.hpp"

namespace nslab {

struct TransportStepConfig {
  double epsilon = 0.0;  // artificial viscosity, >= 0
  double dt = 0.0;       // > 0

  // Explicit upwind convection demands dt * max|u| / spacing <= this.
  static constexpr double cfl_limit = 0.9;
};

// One explicit-upwind / implicit-diffusion step of
//   d_t rho - eps Lap rho + div(rho u) = 0
// with the Robin boundary operator: total outward flux rho_B u_B.n on
// inflow faces, upwinded convective flux on outflow faces, zero flux on
// u_B.n = 0 faces. Nonnegativity is preserved (M-matrix structure); a
// violation beyond -1e-12 raises SchemeError.
struct TransportStep {
  Field rho;
  double inflow_mass = 0.0;   // dt * inflow boundary integral (positive)
  double outflow_mass = 0.0;  // dt * outflow boundary integral (positive)
  double div_inf_norm = 0.0;  // max |div_h u| incl. boundary faces
};

TransportStep step_continuity(const Field& rho, const VecField& u,
                              const Domain& domain,
                              const BoundaryPartition& partition,
                              const TransportStepConfig& cfg, double t = 0.0);

// Forward declaration; trajectories are produced by the coupled driver in
// momentum.hpp but the density-only audits live here.
struct Trajectory;

// Discrete maximum-principle audit. The asserted envelope compounds the
// per-step discrete divergence bound K_s = max|div_h u|:
//   lo_n = rho_min * prod_{s<n} (1 - dt K_s),  hi_n = rho_max * prod (1 + dt K_s),
// the exact discrete analogue of the continuous exponential envelope, which
// the scheme satisfies up to rounding. The continuous-exponential form with
// a user-supplied constant K is reported alongside but not asserted.
struct MaxPrincipleReport {
  bool pass = true;
  double worst_lower_excess = 0.0;  // max over cells/steps of (lo - rho)+
  double worst_upper_excess = 0.0;
  double rho_lo = 0.0, rho_hi = 0.0;  // data bounds used
  double slack = 0.0;
  // Constant-K exponential envelope report (only when K supplied).
  bool user_k_given = false;
  double user_k = 0.0;
  double worst_lower_excess_expk = 0.0;
  double worst_upper_excess_expk = 0.0;
};

MaxPrincipleReport max_principle_audit(const Trajectory& traj, double user_k = -1.0);

struct MassReport {
  double mass_t = 0.0;
  double inflow_integral = 0.0;
  double outflow_integral = 0.0;
  double residual = 0.0;        // at the final stored time
  double worst_residual = 0.0;  // over all stored times
};

MassReport mass_ledger(const Trajectory& traj);

// Scalar renormalization b and a smooth space-time test field, both with
// the derivatives the audits need.
struct RenormFunction {
  std::function<double(double)> b, db, ddb;
};
RenormFunction renorm_identity();
RenormFunction renorm_constant(double c);
RenormFunction renorm_half_square();

struct TestField {
  std::string name;
  std::function<double(double, const Vec2&)> value;
  std::function<double(double, const Vec2&)> dt;
  std::function<Vec2(double, const Vec2&)> grad;
};

// Space-time residual of the pointwise renormalized identity, assembled
// with the solver's own stencils and tested against `test`; magnitude.
double renorm_residual(const Trajectory& traj, const RenormFunction& b,
                       const TestField& test);

// Signed defect of the L2 identity obtained by testing the regularized
// continuity equation with rho itself.
double l2_identity_audit(const Trajectory& traj);

}  // namespace nslab
