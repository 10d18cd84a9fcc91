#pragma once

#include <optional>
#include <string>

#include "nslab/types.hpp"

namespace nslab {

// Compactly supported C^2 perturbation of a monotone pressure law,
// nonpositive by construction: -amplitude * bump((rho-center)/width + 1/2)
// supported on [center-width/2, center+width/2].
struct PressurePerturbation {
  double amplitude = 0.0;  // >= 0; the perturbation itself is <= 0
  double center = 1.0;
  double width = 1.0;

  double value(double rho) const;
  double d1(double rho) const;
  double d2(double rho) const;
};

// Barotropic pressure law. Flat representation of the three catalog kinds:
//   power:        p = a rho^gamma
//   regularized:  p = a rho^gamma + delta rho^beta
//   nonmonotone:  p = pi + perturbation, pi = a rho^gamma monotone
// The Helmholtz potential and everything derived from it (relative energy,
// bound constants) are computed from the monotone core plus the delta part;
// the perturbation never enters them.
class PressureLaw {
 public:
  static PressureLaw power(double coeff, double gamma);
  static PressureLaw regularized(const PressureLaw& base, double delta, double beta);
  static PressureLaw nonmonotone(const PressureLaw& monotone,
                                 const PressurePerturbation& pert);

  double pressure(double rho) const;
  double dpressure(double rho) const;
  double ddpressure(double rho) const;

  // Pressure entering the Helmholtz potential: full p for the monotone
  // kinds, the monotone part pi for the perturbed kind.
  double helm_pressure(double rho) const;
  double dhelm_pressure(double rho) const;
  double ddhelm_pressure(double rho) const;

  double helmholtz(double rho) const;
  double dhelmholtz(double rho) const;
  double ddhelmholtz(double rho) const;

  bool is_monotone() const { return !pert_.has_value(); }
  bool is_regularized() const { return delta_ > 0.0; }
  double coeff() const { return a_; }
  double gamma() const { return gamma_; }
  double delta() const { return delta_; }
  double beta() const { return beta_; }
  std::string kind_name() const;

  // Vectorized conveniences.
  Field pressure(const Field& rho) const;
  Field helmholtz(const Field& rho) const;
  Field dhelmholtz(const Field& rho) const;
  Field ddhelmholtz(const Field& rho) const;

 private:
  PressureLaw() = default;
  double a_ = 1.0;
  double gamma_ = 2.0;
  double delta_ = 0.0;
  double beta_ = 0.0;
  std::optional<PressurePerturbation> pert_;
};

struct ThermoSample {
  double rho = 0.0;
  double p = 0.0, dp = 0.0;
  double H = 0.0, dH = 0.0, ddH = 0.0;
};

ThermoSample thermo_eval(const PressureLaw& law, double rho);

// Bregman distance of the Helmholtz potential; >= 0 for monotone laws,
// zero iff rho == r.
double relative_energy(const PressureLaw& law, double rho, double r);
Field relative_energy(const PressureLaw& law, const Field& rho, const Field& r);
Field relative_energy(const PressureLaw& law, const Field& rho, double r);

// Helmholtz potential by adaptive Simpson quadrature of the defining
// integral, rel. tolerance 1e-10. Fallback/oracle path; the catalog laws
// all have closed forms.
double helmholtz_by_quadrature(const PressureLaw& law, double rho,
                               double rel_tol = 1e-10);

// Essential/residual split of a density field against the window
// [a/2, 2b] spanned by the strong-solution bounds.
struct EssResSplit {
  double a = 0.0, b = 0.0;
  Mask ess;  // res = !ess
  static bool essential(double rho, double a, double b) {
    return rho >= 0.5 * a && rho <= 2.0 * b;
  }
};

EssResSplit ess_res_split(const Field& rho, double a, double b);

// Grid specification for the brute-force constants. Steps are documented so
// constants are reproducible bit for bit.
struct ConstantGrid {
  double rho_max = 0.0;   // 0 -> defaulted to 4b + 4
  double rho_step = 1e-3;
  double r_step = 1e-3;
};

struct LowerBoundConstant {
  double c = 0.0;
  double arg_rho = 0.0, arg_r = 0.0;
  ConstantGrid grid;
};

// Brute-force minimum over the (rho, r) grid of
//   E(rho|r) / (1_res + rho 1_res + (rho-r)^2 1_ess),
// the computable certificate for the relative-energy lower bound.
LowerBoundConstant lower_bound_constant(const PressureLaw& law, double a, double b,
                                        ConstantGrid grid = {});

struct ResidualPressureConstant {
  double c = 0.0;            // smallest constant with p(rho) 1_res <= c E(rho|r)
  double arg_rho = 0.0, arg_r = 0.0;
  double w1_c_lin = 0.0;     // growth constant with c_lin (rho + H) >= p on samples
  ConstantGrid grid;
};

// Grid maximization of p(rho) 1_res / E(rho|r), after verifying the linear
// growth hypothesis c_lin (rho + H(rho)) >= p(rho) on the sampled tail.
ResidualPressureConstant residual_pressure_check(const PressureLaw& law, double a,
                                                 double b, ConstantGrid grid = {});

// Field-level constant for the combined residual/essential lower bound:
// min(lower_bound_constant, 1/residual_pressure_constant) / 3.
double rentropy_constant(double lower_bound_c, double residual_pressure_c);

}  // namespace nslab
