#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nslab/grid.hpp"
#include "nslab/momentum.hpp"
#include "nslab/thermo.hpp"

namespace nslab {

// Manufactured strong solution: space-time samplers for the density r, the
// velocity U, the forcing f, and the derivative fields the remainder and
// certificate need. 1D cases use component 0 of the Vec2 arguments.
struct StrongSolution {
  std::string name;
  std::function<double(double, const Vec2&)> r;
  std::function<double(double, const Vec2&)> dt_r;
  std::function<Vec2(double, const Vec2&)> grad_r;
  std::function<Vec2(double, const Vec2&)> U;
  std::function<Vec2(double, const Vec2&)> dt_U;
  std::function<Mat2(double, const Vec2&)> grad_U;  // (a,b) = d_a U_b
  std::function<Vec2(double, const Vec2&)> div_stress_U;  // div S(grad U)
  ForcingSampler forcing;  // empty = zero forcing
  double r_lo = 0.0, r_hi = 0.0;  // declared bounds 0 < r_lo <= r <= r_hi

  double div_U(double t, const Vec2& x) const {
    const Mat2 g = grad_U(t, x);
    return g(0, 0) + g(1, 1);
  }
  Vec2 force_at(double t, const Vec2& x) const {
    return forcing ? forcing(t, x) : Vec2::Zero();
  }

  // Residuals of the continuity / momentum equations on a sample grid;
  // the class invariants require both below ~1e-8.
  double continuity_residual(const Domain& domain, double t) const;
  double momentum_residual(const Domain& domain, const PressureLaw& law,
                           const ViscosityParams& visc, double t) const;

  Field sample_r(const Domain& domain, double t) const;
  VecField sample_U(const Domain& domain, double t) const;
};

// Density transported along the characteristics of U from the initial
// profile r0, with the exponential divergence factor integrated along the
// path (adaptive embedded RK, tolerance 1e-10). `window` bounds the region
// where U is defined; a characteristic leaving it raises DomainError.
struct CharacteristicsOptions {
  double tol = 1e-10;
  Eigen::AlignedBox2d window =
      Eigen::AlignedBox2d(Vec2(-1e30, -1e30), Vec2(1e30, 1e30));
};

double characteristics_density(
    const std::function<Vec2(double, const Vec2&)>& velocity,
    const std::function<double(double, const Vec2&)>& div_velocity,
    const std::function<double(const Vec2&)>& r0, double t, const Vec2& x,
    const CharacteristicsOptions& opt = {});

// Forcing that closes the momentum equation for the pair (r, U):
// f = [r dU/dt + r U.grad U + grad p(r) - div S(grad U)] / r.
ForcingSampler manufacture_forcing(const StrongSolution& sol, const PressureLaw& law,
                                   const ViscosityParams& visc);

// Builtin manufactured catalog. All pairs have static velocity traces.
//   uniform:     r = r0, U = c                      (force-free)
//   wave:        r = 1 + amp sin(2 pi (x - c t)),   U = c, pressure forcing
//   hydrostatic: r = 1 + amp sin(2 pi x), U = 0,    pressure forcing
//   expansion:   r = r0 exp(-t), U = x              (1D, force from stress=0)
StrongSolution make_strong_solution(const std::string& name, const PressureLaw& law,
                                    const ViscosityParams& visc,
                                    double param_a = 1.0, double param_b = 0.0);

// Instantaneous rates of the quadratic-remainder groups at time t, plus the
// trajectory-integrated remainder used by the REIS ledger.
struct RemainderRates {
  double boundary = 0.0;
  double velocity_group = 0.0;  // dU/dt + convection + gradient coupling
  double pressure_group = 0.0;  // pressure Taylor defect times div U
  double grad_r_group = 0.0;    // (1 - rho/r) p'(r) (v-V).grad r
  double forcing_group = 0.0;   // (rho - r) f.(v-V)
  double total() const {
    return boundary + velocity_group + pressure_group + grad_r_group + forcing_group;
  }
};

RemainderRates remainder_rates(const Field& rho, const VecField& u,
                               const Domain& domain,
                               const BoundaryPartition& partition,
                               const StrongSolution& strong, const PressureLaw& law,
                               double t);

struct Remainder {
  RemainderRates groups;  // time-integrated groups over [0, tau]
  double total = 0.0;
};

Remainder remainder(const Trajectory& traj, const StrongSolution& strong, double tau);

// Explicit, documented Gronwall data: the rate function a(t) sampled per
// stored step, the multiplicative constant of the frozen remainder-estimate
// recipe, and the resulting bound curve
//   bound(tau) = c (E(0) + ||rho_B - r_B||_{L1(in)}) exp(int_0^tau a).
struct GronwallCertificate {
  std::vector<double> times;
  std::vector<double> a_samples;
  double constant_c = 1.0;
  double boundary_l1 = 0.0;  // ||rho_B - r_B||_{L1(inflow)}
  double e0 = 0.0;
  std::vector<double> bound_curve;
  // Frozen recipe ingredients, reported for reproducibility.
  double c_rent = 0.0;
  double c_lower_bound = 0.0;
  double c_residual_pressure = 0.0;
  double poincare_sq = 0.0;  // C_P^2 of the discrete gradient
  double delta_split = 0.0;  // mu/4
};

GronwallCertificate gronwall_certificate(const StrongSolution& strong,
                                         const PressureLaw& law,
                                         const ViscosityParams& visc,
                                         const Domain& domain,
                                         const BoundaryPartition& partition,
                                         double t_end, double dt, double e0,
                                         double boundary_l1);

// Relative energy E(rho, v | r, V)(t) between a trajectory state and the
// strong pair sampled on the grid.
double relative_energy_vs_strong(const Trajectory& traj, const StrongSolution& strong,
                                 int step);

struct StabilityConfig {
  std::string base_case = "uniform";
  double param_a = 1.0, param_b = 0.0;   // catalog parameters
  std::string perturb = "rho0";          // rho0 | u0 | rhoB
  std::vector<double> etas;
  int cells = 100;
  double t_end = 0.25;
  double cfl = 0.45;
  unsigned seed = 0;                      // seeds the perturbation shape
  double slack_rel = 0.0;                 // 0 -> frozen default
};

struct StabilityVerdict {
  std::string case_name;
  double eta = 0.0;
  int cells = 0;
  double e0 = 0.0;
  double max_violation = 0.0;  // max over tau of E - bound - slack
  bool pass = true;
  std::vector<double> times;
  std::vector<double> e_curve;
  std::vector<double> bound_curve;
};

std::vector<StabilityVerdict> stability_experiment(const PressureLaw& law,
                                                   const ViscosityParams& visc,
                                                   const StabilityConfig& cfg);

}  // namespace nslab
