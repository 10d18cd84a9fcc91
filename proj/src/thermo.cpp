#include "nslab/thermo.hpp"

#include <cmath>
#include <limits>

namespace nslab {

namespace {

// C^2 bump on (0,1): quintic smoothstep up and down, peak 1 at 1/2.
double bump01(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double s = 1.0 - std::abs(2.0 * t - 1.0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double dbump01(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double s = 1.0 - std::abs(2.0 * t - 1.0);
  const double ds = t < 0.5 ? 2.0 : -2.0;
  return (30.0 * s * s - 60.0 * s * s * s + 30.0 * s * s * s * s) * ds;
}

double ddbump01(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double s = 1.0 - std::abs(2.0 * t - 1.0);
  return (60.0 * s - 180.0 * s * s + 120.0 * s * s * s) * 4.0;
}

}  // namespace

double PressurePerturbation::value(double rho) const {
  return -amplitude * bump01((rho - center) / width + 0.5);
}
double PressurePerturbation::d1(double rho) const {
  return -amplitude / width * dbump01((rho - center) / width + 0.5);
}
double PressurePerturbation::d2(double rho) const {
  return -amplitude / (width * width) * ddbump01((rho - center) / width + 0.5);
}

PressureLaw PressureLaw::power(double coeff, double gamma) {
  if (!(coeff > 0.0)) throw ConfigError("pressure coefficient must be positive");
  if (!(gamma > 1.0)) throw ConfigError("pressure exponent gamma must exceed 1");
  PressureLaw law;
  law.a_ = coeff;
  law.gamma_ = gamma;
  return law;
}

PressureLaw PressureLaw::regularized(const PressureLaw& base, double delta,
                                     double beta) {
  if (!(delta > 0.0)) throw ConfigError("artificial pressure delta must be positive");
  if (!(beta > std::max(base.gamma_, 4.5)))
    throw ConfigError("beta must satisfy beta > max{gamma, 9/2}");
  PressureLaw law = base;
  law.delta_ = delta;
  law.beta_ = beta;
  return law;
}

PressureLaw PressureLaw::nonmonotone(const PressureLaw& monotone,
                                     const PressurePerturbation& pert) {
  if (!(pert.amplitude >= 0.0) || !(pert.width > 0.0))
    throw ConfigError("perturbation needs amplitude >= 0 and width > 0");
  PressureLaw law = monotone;
  law.pert_ = pert;
  return law;
}

double PressureLaw::helm_pressure(double rho) const {
  double p = a_ * std::pow(rho, gamma_);
  if (delta_ > 0.0) p += delta_ * std::pow(rho, beta_);
  return p;
}

double PressureLaw::dhelm_pressure(double rho) const {
  double dp = a_ * gamma_ * std::pow(rho, gamma_ - 1.0);
  if (delta_ > 0.0) dp += delta_ * beta_ * std::pow(rho, beta_ - 1.0);
  return dp;
}

double PressureLaw::ddhelm_pressure(double rho) const {
  double ddp = a_ * gamma_ * (gamma_ - 1.0) * std::pow(rho, gamma_ - 2.0);
  if (delta_ > 0.0)
    ddp += delta_ * beta_ * (beta_ - 1.0) * std::pow(rho, beta_ - 2.0);
  return ddp;
}

double PressureLaw::pressure(double rho) const {
  double p = helm_pressure(rho);
  if (pert_) p += pert_->value(rho);
  return p;
}

double PressureLaw::dpressure(double rho) const {
  double dp = dhelm_pressure(rho);
  if (pert_) dp += pert_->d1(rho);
  return dp;
}

double PressureLaw::ddpressure(double rho) const {
  double ddp = a_ * gamma_ * (gamma_ - 1.0) * std::pow(rho, gamma_ - 2.0);
  if (delta_ > 0.0)
    ddp += delta_ * beta_ * (beta_ - 1.0) * std::pow(rho, beta_ - 2.0);
  if (pert_) ddp += pert_->d2(rho);
  return ddp;
}

double PressureLaw::helmholtz(double rho) const {
  // Closed form of rho * int_1^rho p(z)/z^2 dz for p = a z^g (+ delta z^b):
  // a (rho^g - rho)/(g-1) + delta rho^b/(b-1) - delta rho/(b-1) ... the
  // delta part of the definition integrates to delta(rho^b - rho)/(b-1);
  // the artificial Helmholtz part used throughout is delta rho^b/(b-1),
  // whose Bregman distance coincides with that of the full integral (they
  // differ by a linear function of rho).
  if (rho == 0.0) return 0.0;
  double H = a_ * (std::pow(rho, gamma_) - rho) / (gamma_ - 1.0);
  if (delta_ > 0.0) H += delta_ * std::pow(rho, beta_) / (beta_ - 1.0);
  return H;
}

double PressureLaw::dhelmholtz(double rho) const {
  double dH = a_ * (gamma_ * std::pow(rho, gamma_ - 1.0) - 1.0) / (gamma_ - 1.0);
  if (delta_ > 0.0)
    dH += delta_ * beta_ * std::pow(rho, beta_ - 1.0) / (beta_ - 1.0);
  return dH;
}

double PressureLaw::ddhelmholtz(double rho) const {
  double ddH = a_ * gamma_ * std::pow(rho, gamma_ - 2.0);
  if (delta_ > 0.0) ddH += delta_ * beta_ * std::pow(rho, beta_ - 2.0);
  return ddH;
}

std::string PressureLaw::kind_name() const {
  if (pert_) return delta_ > 0.0 ? "nonmonotone+regularized" : "nonmonotone";
  return delta_ > 0.0 ? "regularized" : "power";
}

Field PressureLaw::pressure(const Field& rho) const {
  return rho.unaryExpr([this](double r) { return pressure(r); });
}
Field PressureLaw::helmholtz(const Field& rho) const {
  return rho.unaryExpr([this](double r) { return helmholtz(r); });
}
Field PressureLaw::dhelmholtz(const Field& rho) const {
  return rho.unaryExpr([this](double r) { return dhelmholtz(r); });
}
Field PressureLaw::ddhelmholtz(const Field& rho) const {
  return rho.unaryExpr([this](double r) { return ddhelmholtz(r); });
}

ThermoSample thermo_eval(const PressureLaw& law, double rho) {
  if (rho < 0.0) throw DomainError("thermo_eval: negative density");
  ThermoSample s;
  s.rho = rho;
  s.p = law.pressure(rho);
  s.dp = law.dpressure(rho);
  s.H = law.helmholtz(rho);
  s.dH = law.dhelmholtz(rho);
  s.ddH = law.ddhelmholtz(rho);
  return s;
}

double relative_energy(const PressureLaw& law, double rho, double r) {
  if (!(r > 0.0)) throw DomainError("relative_energy: reference density r must be positive");
  if (rho < 0.0) throw DomainError("relative_energy: negative density");
  return law.helmholtz(rho) - law.dhelmholtz(r) * (rho - r) - law.helmholtz(r);
}

Field relative_energy(const PressureLaw& law, const Field& rho, const Field& r) {
  Field out(rho.size());
  for (Eigen::Index i = 0; i < rho.size(); ++i)
    out[i] = relative_energy(law, rho[i], r[i]);
  return out;
}

Field relative_energy(const PressureLaw& law, const Field& rho, double r) {
  Field out(rho.size());
  for (Eigen::Index i = 0; i < rho.size(); ++i)
    out[i] = relative_energy(law, rho[i], r);
  return out;
}

namespace {

double simpson(const PressureLaw& law, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  auto f = [&](double z) { return law.helm_pressure(z) / (z * z); };
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fb + 4.0 * frm + fm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson(law, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(law, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double helmholtz_by_quadrature(const PressureLaw& law, double rho, double rel_tol) {
  if (rho < 0.0) throw DomainError("helmholtz_by_quadrature: negative density");
  if (rho == 0.0) return 0.0;
  const double a = std::min(1.0, rho), b = std::max(1.0, rho);
  auto f = [&](double z) { return law.helm_pressure(z) / (z * z); };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::max(std::abs(whole), 1e-30);
  double integral = simpson(law, a, b, fa, fm, fb, whole, rel_tol * scale, 48);
  if (rho < 1.0) integral = -integral;
  return rho * integral;
}

EssResSplit ess_res_split(const Field& rho, double a, double b) {
  if (!(a > 0.0) || !(b >= a))
    throw DomainError("ess_res_split: bounds must satisfy 0 < a <= b");
  EssResSplit s;
  s.a = a;
  s.b = b;
  s.ess = (rho >= 0.5 * a && rho <= 2.0 * b);
  return s;
}

LowerBoundConstant lower_bound_constant(const PressureLaw& law, double a, double b,
                                        ConstantGrid grid) {
  if (!law.is_monotone())
    throw HypothesisError("lower_bound_constant: law must be monotone");
  if (!(a > 0.0) || !(b >= a))
    throw DomainError("lower_bound_constant: bounds must satisfy 0 < a <= b");
  if (grid.rho_max <= 0.0) grid.rho_max = 4.0 * b + 4.0;
  if (grid.rho_max < 4.0 * b)
    throw ConfigError("lower_bound_constant: rho grid must reach 4b");

  LowerBoundConstant out;
  out.grid = grid;
  out.c = std::numeric_limits<double>::infinity();
  const long nr = std::lround((b - a) / grid.r_step);
  const long np = std::lround(grid.rho_max / grid.rho_step);
  Field H_tab(np + 1);
  Mask ess_tab(np + 1);
  for (long i = 0; i <= np; ++i) {
    const double rho = i * grid.rho_step;
    H_tab[i] = law.helmholtz(rho);
    ess_tab[i] = EssResSplit::essential(rho, a, b);
  }
  // Grid points closer than half a step are the diagonal rho == r, where
  // both E and the denominator vanish; skip them.
  const double diag_tol = 0.5 * std::max(grid.rho_step, grid.r_step);
  for (long j = 0; j <= nr; ++j) {
    const double r = a + j * grid.r_step;
    const double Hr = law.helmholtz(r), dHr = law.dhelmholtz(r);
    for (long i = 0; i <= np; ++i) {
      const double rho = i * grid.rho_step;
      if (ess_tab[i] && std::abs(rho - r) < diag_tol) continue;
      const double denom = ess_tab[i] ? (rho - r) * (rho - r) : 1.0 + rho;
      const double E = H_tab[i] - dHr * (rho - r) - Hr;
      const double ratio = E / denom;
      if (ratio < out.c) {
        out.c = ratio;
        out.arg_rho = rho;
        out.arg_r = r;
      }
    }
  }
  return out;
}

ResidualPressureConstant residual_pressure_check(const PressureLaw& law, double a,
                                                 double b, ConstantGrid grid) {
  if (!(a > 0.0) || !(b >= a))
    throw DomainError("residual_pressure_check: bounds must satisfy 0 < a <= b");
  if (grid.rho_max <= 0.0) grid.rho_max = 4.0 * b + 4.0;

  // Sampled growth hypothesis: fit c_lin on [R, rho_max/2], verify with 10%
  // headroom on (rho_max/2, rho_max].
  const double R = 2.0 * b;
  ResidualPressureConstant out;
  out.grid = grid;
  const long np = std::lround(grid.rho_max / grid.rho_step);
  double c_lin = 0.0;
  for (long i = 0; i <= np; ++i) {
    const double rho = i * grid.rho_step;
    if (rho < R || rho > 0.5 * grid.rho_max) continue;
    c_lin = std::max(c_lin, law.pressure(rho) / (rho + law.helmholtz(rho)));
  }
  for (long i = 0; i <= np; ++i) {
    const double rho = i * grid.rho_step;
    if (rho <= 0.5 * grid.rho_max) continue;
    const double ratio = law.pressure(rho) / (rho + law.helmholtz(rho));
    if (ratio > 1.1 * c_lin)
      throw HypothesisError(
          "residual_pressure_check: growth hypothesis fails at rho = " +
          std::to_string(rho));
  }
  out.w1_c_lin = 1.1 * c_lin;

  const long nr = std::lround((b - a) / grid.r_step);
  Field H_tab(np + 1), p_tab(np + 1);
  Mask res_tab(np + 1);
  for (long i = 0; i <= np; ++i) {
    const double rho = i * grid.rho_step;
    H_tab[i] = law.helmholtz(rho);
    p_tab[i] = law.pressure(rho);
    res_tab[i] = !EssResSplit::essential(rho, a, b);
  }
  for (long j = 0; j <= nr; ++j) {
    const double r = a + j * grid.r_step;
    const double Hr = law.helmholtz(r), dHr = law.dhelmholtz(r);
    for (long i = 0; i <= np; ++i) {
      if (!res_tab[i]) continue;
      const double rho = i * grid.rho_step;
      const double E = H_tab[i] - dHr * (rho - r) - Hr;
      if (E <= 0.0) continue;
      const double ratio = p_tab[i] / E;
      if (ratio > out.c) {
        out.c = ratio;
        out.arg_rho = rho;
        out.arg_r = r;
      }
    }
  }
  return out;
}

double rentropy_constant(double lower_bound_c, double residual_pressure_c) {
  return std::min(lower_bound_c, 1.0 / residual_pressure_c) / 3.0;
}

}  // namespace nslab
