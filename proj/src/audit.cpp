#include "nslab/audit.hpp"

#include <cmath>

namespace nslab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// All relative-energy machinery is evaluated with the pressure consistent
// with the Helmholtz potential (pi + delta rho^beta); for monotone laws this
// is the full pressure. The nonmonotone perturbation is excluded from the
// algebra on purpose.
double hp(const PressureLaw& law, double rho) { return law.helm_pressure(rho); }
double dhp(const PressureLaw& law, double rho) { return law.dhelm_pressure(rho); }

double kinetic_rel(const Domain& d, const Field& rho, const VecField& w) {
  return 0.5 * integrate(d, Field(rho * w.square().rowwise().sum()));
}

Field grad4(const Domain& d, const VecField& v) {
  const TensorField g = grad_ghostzero(d, v);
  Field g2 = Field::Zero(g.rows());
  for (int c = 0; c < g.cols(); ++c) g2 += g.col(c) * g.col(c);
  return g2 * g2;
}

}  // namespace

EnergyLedger energy_ledger(const Trajectory& traj, double tau) {
  if (!traj.every_step_stored())
    throw TestConfigError("energy_ledger needs a trajectory stored at cadence 1");
  const Domain& d = traj.domain;
  const BoundaryPartition& p = traj.partition;
  const PressureLaw& law = traj.law;
  const int m = traj.index_of_time(tau);

  EnergyLedger led;
  led.tau = tau;
  {
    const VecField v = traj.v_at(m);
    led.final_energy = kinetic_rel(d, traj.rho[m], v) +
                       integrate(d, law.helmholtz(traj.rho[m]));
    const VecField v0 = traj.v_at(0);
    led.initial_energy = kinetic_rel(d, traj.rho[0], v0) +
                         integrate(d, law.helmholtz(traj.rho[0]));
  }

  const Field div_uinf = div_central(d, traj.ext.u_inf);
  const TensorField grad_uinf = grad_central(d, traj.ext.u_inf);
  const double dt = traj.dt;

  for (int n = 0; n < m; ++n) {
    const double t = traj.times[n];
    const Field& rho0 = traj.rho[n];
    const Field& rho1 = traj.rho[n + 1];
    const VecField& u0 = traj.u[n];
    const VecField u1v = traj.u[n + 1];
    const VecField v1 = u1v - traj.ext.u_inf;

    for (int f = 0; f < p.face_count(); ++f) {
      const Face& face = p.faces[f];
      const double absun = std::abs(p.ub_dot_n[f]);
      if (p.cls[f] == FaceClass::In) {
        const double rb = p.rho_b_at(t, f);
        led.inflow_relative_term +=
            relative_energy(law, rb, std::max(rho0[face.cell], 1e-300)) * absun *
            face.measure * dt;
        led.inflow_helmholtz_flux += law.helmholtz(rb) * absun * face.measure * dt;
      } else if (p.cls[f] == FaceClass::Out) {
        led.outflow_helmholtz_term +=
            law.helmholtz(rho0[face.cell]) * absun * face.measure * dt;
      }
    }

    led.viscous_dissipation +=
        stress_pairing(d, u1v, v1, traj.viscosity) * dt;
    if (traj.epsilon > 0.0) {
      const Field g2 = face_grad_sq(d, rho1);
      led.eps_density_dissipation +=
          traj.epsilon * integrate(d, Field(law.ddhelmholtz(rho1) * g2)) * dt;
      led.eps_quartic_dissipation += traj.epsilon * integrate(d, grad4(d, v1)) * dt;

      const VecField grad_rho = grad_central(d, rho1);
      const TensorField grad_v = grad_ghostzero(d, v1);
      Field cross = Field::Zero(d.cell_count());
      for (int a = 0; a < d.dim; ++a)
        for (int b = 0; b < d.dim; ++b)
          cross += grad_rho.col(a) * grad_v.col(a * d.dim + b) *
                   traj.ext.u_inf.col(b);
      led.eps_cross_term += traj.epsilon * integrate(d, cross) * dt;
    }

    led.pressure_div_uinf -=
        integrate(d, Field(rho0.unaryExpr([&](double r) { return hp(law, r); }) *
                           div_uinf)) *
        dt;
    {
      const VecField v0 = u0 - traj.ext.u_inf;
      Field conv = Field::Zero(d.cell_count());
      for (int a = 0; a < d.dim; ++a)
        for (int b = 0; b < d.dim; ++b)
          conv += rho0 * u0.col(a) * grad_uinf.col(a * d.dim + b) * v0.col(b);
      led.convection_uinf -= integrate(d, conv) * dt;

      if (traj.forcing) {
        Field work = Field::Zero(d.cell_count());
        for (int i = 0; i < d.cell_count(); ++i) {
          const Vec2 fv = traj.forcing(t, d.center(i));
          for (int b = 0; b < d.dim; ++b) work[i] += rho0[i] * fv[b] * v0(i, b);
        }
        led.forcing_work += integrate(d, work) * dt;
      }
    }
  }
  return led;
}

namespace {

struct StrongSlice {
  Field r;
  VecField U, V;          // V = U - u_inf
  VecField dtU;
  TensorField gradU;      // (a,b) = d_a U_b
  Field divU;
  VecField gradr;
};

StrongSlice sample_strong(const Trajectory& traj, const StrongSolution& s, double t) {
  const Domain& d = traj.domain;
  const int n = d.cell_count();
  StrongSlice sl;
  sl.r.resize(n);
  sl.U.resize(n, d.dim);
  sl.dtU.resize(n, d.dim);
  sl.gradU.resize(n, d.dim * d.dim);
  sl.divU.resize(n);
  sl.gradr.resize(n, d.dim);
  for (int i = 0; i < n; ++i) {
    const Vec2 x = d.center(i);
    sl.r[i] = s.r(t, x);
    const Vec2 U = s.U(t, x);
    const Vec2 dtU = s.dt_U(t, x);
    const Mat2 g = s.grad_U(t, x);
    const Vec2 gr = s.grad_r(t, x);
    double div = 0.0;
    for (int a = 0; a < d.dim; ++a) {
      sl.U(i, a) = U[a];
      sl.dtU(i, a) = dtU[a];
      sl.gradr(i, a) = gr[a];
      for (int b = 0; b < d.dim; ++b) sl.gradU(i, a * d.dim + b) = g(a, b);
      div += g(a, a);
    }
    sl.divU[i] = div;
  }
  sl.V = sl.U - traj.ext.u_inf;
  return sl;
}

}  // namespace

RelEnergyReport relative_energy_ledger(const Trajectory& traj,
                                       const StrongSolution& strong, double tau,
                                       RelEnergyVariant variant) {
  if (!traj.every_step_stored())
    throw TestConfigError("relative_energy_ledger needs cadence-1 storage");
  const Domain& d = traj.domain;
  const BoundaryPartition& p = traj.partition;
  const PressureLaw& law = traj.law;
  const int m = traj.index_of_time(tau);
  const double dt = traj.dt;

  RelEnergyReport rep;
  rep.variant = variant;
  rep.tau = tau;

  // Eligibility: for REIS the pair must satisfy the strong equations.
  if (variant == RelEnergyVariant::REIS) {
    const double cres = strong.continuity_residual(d, 0.5 * tau);
    const double mres =
        strong.momentum_residual(d, law, traj.viscosity, 0.5 * tau);
    if (cres > 1e-6 || mres > 1e-6)
      throw TestConfigError(
          "ineligible test pair: strong-solution residuals " +
          std::to_string(cres) + ", " + std::to_string(mres));
  }

  {  // continuity residual of the test pair, recorded alongside
    double worst = 0.0;
    for (int n = 0; n <= m; n += std::max(1, m / 8))
      worst = std::max(worst, strong.continuity_residual(d, traj.times[n]));
    rep.test_pair_continuity_residual = worst;
  }

  const StrongSlice s_tau = sample_strong(traj, strong, tau);
  const StrongSlice s_0 = sample_strong(traj, strong, 0.0);
  const Field div_uinf = div_central(d, traj.ext.u_inf);
  const TensorField grad_uinf = grad_central(d, traj.ext.u_inf);

  {
    const VecField w_tau = traj.u[m] - s_tau.U;
    rep.e_tau = kinetic_rel(d, traj.rho[m], w_tau) +
                integrate(d, relative_energy(law, traj.rho[m], s_tau.r));
    const VecField w_0 = traj.u[0] - s_0.U;
    rep.e_initial = kinetic_rel(d, traj.rho[0], w_0) +
                    integrate(d, relative_energy(law, traj.rho[0], s_0.r));
  }
  rep.lhs_terms["relative_energy_tau"] = rep.e_tau;
  rep.rhs_terms["relative_energy_0"] = rep.e_initial;

  double in_rel = 0.0, out_rel = 0.0, diss = 0.0, eps_H = 0.0, eps_q = 0.0;
  double in_taylor = 0.0, vel_group = 0.0, press_group = 0.0, gradr_group = 0.0;
  double z_term = 0.0, eps_cross = 0.0, forcing_term = 0.0, boundary_reis = 0.0;

  for (int n = 0; n < m; ++n) {
    const double t = traj.times[n];
    const StrongSlice sl = sample_strong(traj, strong, t);
    const Field& rho = traj.rho[n];
    const VecField& u = traj.u[n];
    const VecField v = u - traj.ext.u_inf;
    const VecField w = v - sl.V;  // = u - U
    const Field& rho_end = traj.rho[n + 1];
    const VecField u_end = traj.u[n + 1];
    const VecField v_end = u_end - traj.ext.u_inf;

    // Boundary terms.
    for (int f = 0; f < p.face_count(); ++f) {
      const Face& face = p.faces[f];
      const double un = p.ub_dot_n[f];
      const double absun = std::abs(un);
      const int c = face.cell;
      if (p.cls[f] == FaceClass::In) {
        const double rb = p.rho_b_at(t, f);
        const double rB = strong.r(t, face.center);
        if (variant == RelEnergyVariant::REIS) {
          boundary_reis += (law.helmholtz(rB) - law.helmholtz(rb) +
                            (rb - rB) * law.dhelmholtz(rB)) *
                           un * face.measure * dt;
        } else {
          in_rel += relative_energy(law, rb, std::max(rho[c], 1e-300)) * absun *
                    face.measure * dt;
          const double r_here = sl.r[c];
          in_taylor += (law.helmholtz(r_here) - r_here * law.dhelmholtz(r_here) -
                        law.helmholtz(rb) + rb * law.dhelmholtz(r_here)) *
                       un * face.measure * dt;
        }
      } else if (p.cls[f] == FaceClass::Out && variant == RelEnergyVariant::REA) {
        out_rel += relative_energy(law, rho[c], sl.r[c]) * un * face.measure * dt;
      }
    }

    // Dissipation difference.
    if (variant == RelEnergyVariant::REIS) {
      const VecField w_end = u_end - sample_strong(traj, strong, traj.times[n + 1]).U;
      diss += stress_pairing(d, w_end, w_end, traj.viscosity) * dt;
    } else {
      const VecField w_end = v_end - sl.V;
      diss += stress_pairing(d, u_end, w_end, traj.viscosity) * dt;
    }

    if (variant == RelEnergyVariant::REA && traj.epsilon > 0.0) {
      const Field g2 = face_grad_sq(d, rho_end);
      eps_H += traj.epsilon * integrate(d, Field(law.ddhelmholtz(rho_end) * g2)) * dt;
      eps_q += traj.epsilon * integrate(d, grad4(d, v_end)) * dt;

      const QuarticFlux q = quartic_flux(d, v, traj.epsilon);
      Field zv = Field::Zero(d.cell_count());
      const VecField grad_rho = grad_central(d, rho_end);
      const TensorField grad_uV = grad_central(d, VecField(u - sl.V));
      for (int a = 0; a < d.dim; ++a)
        for (int b = 0; b < d.dim; ++b) {
          const int c = a * d.dim + b;
          zv += q.z.col(c) * (sl.gradU.col(c) - grad_uinf.col(c));
          eps_cross += traj.epsilon *
                       integrate(d, Field(grad_rho.col(a) * grad_uV.col(c) *
                                          sl.V.col(b))) *
                       dt;
        }
      z_term += integrate(d, zv) * dt;
    }

    // Volume groups.
    Field g_vel = Field::Zero(d.cell_count());
    Field g_press = Field::Zero(d.cell_count());
    Field g_gradr = Field::Zero(d.cell_count());
    for (int i = 0; i < d.cell_count(); ++i) {
      const double r_i = sl.r[i];
      double vel = 0.0;
      for (int b = 0; b < d.dim; ++b) {
        if (variant == RelEnergyVariant::REIS) {
          // (rho - r)(V - v).dtU + (rho - r) U.gradU.(V - v) + rho (v-V).gradU.(V-v)
          double conv_s = 0.0, conv_w = 0.0;
          for (int a = 0; a < d.dim; ++a) {
            conv_s += sl.U(i, a) * sl.gradU(i, a * d.dim + b);
            conv_w += w(i, a) * sl.gradU(i, a * d.dim + b);
          }
          vel += (rho[i] - r_i) * (-w(i, b)) * (sl.dtU(i, b) + conv_s) -
                 rho[i] * conv_w * w(i, b);
        } else {
          // rho (V - v).dtV + rho u.gradU.(V - v)
          double conv = 0.0;
          for (int a = 0; a < d.dim; ++a)
            conv += u(i, a) * sl.gradU(i, a * d.dim + b);
          vel += rho[i] * (-w(i, b)) * sl.dtU(i, b) + rho[i] * conv * (-w(i, b));
        }
      }
      g_vel[i] = vel;

      const double pr = hp(law, r_i), dpr = dhp(law, r_i);
      g_press[i] = (pr - dpr * (r_i - rho[i]) - hp(law, rho[i])) * sl.divU[i];

      double gr = 0.0;
      for (int a = 0; a < d.dim; ++a) {
        if (variant == RelEnergyVariant::REIS) {
          gr += (1.0 - rho[i] / r_i) * dpr * w(i, a) * sl.gradr(i, a);
        } else {
          // (r-rho)/r p'(r) (v-V).gradr - p'(r) v.gradr   (- p(r) div V below)
          gr += (r_i - rho[i]) / r_i * dpr * w(i, a) * sl.gradr(i, a) -
                dpr * v(i, a) * sl.gradr(i, a);
        }
      }
      if (variant != RelEnergyVariant::REIS)
        gr -= pr * (sl.divU[i] - div_uinf[i]);  // -p(r) div V
      g_gradr[i] = gr;
    }
    vel_group += integrate(d, g_vel) * dt;
    press_group += integrate(d, g_press) * dt;
    gradr_group += integrate(d, g_gradr) * dt;

    if (traj.forcing) {
      Field fw = Field::Zero(d.cell_count());
      for (int i = 0; i < d.cell_count(); ++i) {
        const Vec2 fv = traj.forcing(t, d.center(i));
        for (int b = 0; b < d.dim; ++b) {
          const double wf = variant == RelEnergyVariant::REIS
                                ? (rho[i] - sl.r[i]) * fv[b] * w(i, b)
                                : rho[i] * fv[b] * w(i, b);
          fw[i] += wf;
        }
      }
      forcing_term += integrate(d, fw) * dt;
    }
  }

  rep.dissipation_diff = diss;
  rep.lhs_terms["dissipation_diff"] = diss;
  if (variant == RelEnergyVariant::REA) {
    rep.lhs_terms["inflow_relative"] = in_rel;
    rep.lhs_terms["outflow_relative"] = out_rel;
    rep.lhs_terms["eps_density_dissipation"] = eps_H;
    rep.lhs_terms["eps_quartic_dissipation"] = eps_q;
    rep.rhs_terms["z_grad_V"] = z_term;
    rep.rhs_terms["eps_cross"] = eps_cross;
  }
  if (variant == RelEnergyVariant::REIS) {
    rep.rhs_terms["boundary_taylor"] = boundary_reis;
    rep.remainder_boundary = boundary_reis;
    rep.remainder_velocity_group = vel_group;
    rep.remainder_pressure_group = press_group;
    rep.remainder_grad_r_group = gradr_group;
    rep.remainder_forcing_group = forcing_term;
    rep.remainder_total =
        boundary_reis + vel_group + press_group + gradr_group + forcing_term;
  } else {
    rep.rhs_terms["inflow_taylor"] = in_taylor;
  }
  rep.rhs_terms["velocity_group"] = vel_group;
  rep.rhs_terms["pressure_group"] = press_group;
  rep.rhs_terms["grad_r_group"] = gradr_group;
  if (traj.forcing) rep.rhs_terms["forcing"] = forcing_term;

  rep.lhs_total = rep.e_tau + diss + in_rel + out_rel + eps_H + eps_q;
  rep.rhs_total = rep.e_initial + in_taylor + vel_group + press_group +
                  gradr_group + z_term + eps_cross + forcing_term + boundary_reis;
  rep.residual = rep.rhs_total - rep.lhs_total;
  return rep;
}

TestField test_field(const std::string& name, const Domain& domain) {
  const double lo0 = domain.lower[0], hi0 = domain.upper[0];
  const double lo1 = domain.lower[1], hi1 = domain.upper[1];
  const int dim = domain.dim;
  if (name == "one") {
    return {"one", [](double, const Vec2&) { return 1.0; },
            [](double, const Vec2&) { return 0.0; },
            [](double, const Vec2&) { return Vec2::Zero(); }};
  }
  if (name == "parabola" || name == "parabola_cos") {
    const bool timed = name == "parabola_cos";
    auto space = [=](const Vec2& x) {
      double v = (x[0] - lo0) * (hi0 - x[0]);
      if (dim == 2) v *= (x[1] - lo1) * (hi1 - x[1]);
      return v;
    };
    auto gspace = [=](const Vec2& x) {
      Vec2 g = Vec2::Zero();
      const double sx = (x[0] - lo0) * (hi0 - x[0]);
      const double dx = (lo0 + hi0 - 2.0 * x[0]);
      if (dim == 1) {
        g[0] = dx;
      } else {
        const double sy = (x[1] - lo1) * (hi1 - x[1]);
        const double dy = (lo1 + hi1 - 2.0 * x[1]);
        g[0] = dx * sy;
        g[1] = sx * dy;
      }
      return g;
    };
    auto amp = [timed](double t) { return timed ? 1.0 + 0.5 * std::cos(t) : 1.0; };
    auto damp = [timed](double t) { return timed ? -0.5 * std::sin(t) : 0.0; };
    return {name,
            [=](double t, const Vec2& x) { return amp(t) * space(x); },
            [=](double t, const Vec2& x) { return damp(t) * space(x); },
            [=](double t, const Vec2& x) { return Vec2(amp(t) * gspace(x)); }};
  }
  if (name == "sine") {
    const double L0 = hi0 - lo0, L1 = hi1 - lo1;
    return {"sine",
            [=](double, const Vec2& x) {
              double v = std::sin(kPi * (x[0] - lo0) / L0);
              if (dim == 2) v *= std::sin(kPi * (x[1] - lo1) / L1);
              return v;
            },
            [](double, const Vec2&) { return 0.0; },
            [=](double, const Vec2& x) {
              Vec2 g = Vec2::Zero();
              const double s0 = std::sin(kPi * (x[0] - lo0) / L0);
              const double c0 = std::cos(kPi * (x[0] - lo0) / L0) * kPi / L0;
              if (dim == 1) {
                g[0] = c0;
              } else {
                const double s1 = std::sin(kPi * (x[1] - lo1) / L1);
                const double c1 = std::cos(kPi * (x[1] - lo1) / L1) * kPi / L1;
                g[0] = c0 * s1;
                g[1] = s0 * c1;
              }
              return g;
            }};
  }
  if (name == "ramp_in") {
    const double L0 = hi0 - lo0;
    return {"ramp_in",
            [=](double, const Vec2& x) { return (hi0 - x[0]) / L0; },
            [](double, const Vec2&) { return 0.0; },
            [=](double, const Vec2&) { return Vec2(-1.0 / L0, 0.0); }};
  }
  throw ConfigError("unknown test field '" + name + "'");
}

double weak_form_residual(const Trajectory& traj, WeakForm which,
                          const TestField& test, double tau) {
  if (!traj.every_step_stored())
    throw TestConfigError("weak_form_residual needs cadence-1 storage");
  const Domain& d = traj.domain;
  const BoundaryPartition& p = traj.partition;
  const int m = traj.index_of_time(tau);
  const double dt = traj.dt;
  const double vol = d.cell_volume();

  if (which == WeakForm::ME) {
    for (int f = 0; f < p.face_count(); ++f)
      if (std::abs(test.value(0.0, p.faces[f].center)) > 1e-12)
        throw TestConfigError("momentum test field must vanish on the boundary");
  }

  double lhs = 0.0, rhs = 0.0;
  if (which == WeakForm::CE) {
    for (int i = 0; i < d.cell_count(); ++i) {
      lhs += traj.rho[m][i] * test.value(tau, d.center(i)) * vol -
             traj.rho[0][i] * test.value(0.0, d.center(i)) * vol;
    }
    for (int n = 0; n < m; ++n) {
      const double t = traj.times[n];
      const Field& rho = traj.rho[n];
      const VecField grad_rho1 = traj.epsilon > 0.0
                                     ? grad_central(d, traj.rho[n + 1])
                                     : VecField::Zero(d.cell_count(), d.dim);
      for (int i = 0; i < d.cell_count(); ++i) {
        const Vec2 x = d.center(i);
        const Vec2 g = test.grad(t, x);
        double s = rho[i] * test.dt(t, x);
        for (int a = 0; a < d.dim; ++a) {
          s += rho[i] * traj.u[n](i, a) * g[a];
          if (traj.epsilon > 0.0) s -= traj.epsilon * grad_rho1(i, a) * g[a];
        }
        rhs += s * vol * dt;
      }
      for (int f = 0; f < p.face_count(); ++f) {
        const Face& face = p.faces[f];
        const double phi = test.value(t, face.center);
        if (p.cls[f] == FaceClass::In)
          rhs -= p.rho_b_at(t, f) * p.ub_dot_n[f] * phi * face.measure * dt;
        else if (p.cls[f] == FaceClass::Out)
          rhs -= rho[face.cell] * p.ub_dot_n[f] * phi * face.measure * dt;
      }
    }
    return std::abs(lhs - rhs);
  }

  // ME: vector test field phi = (test value) e_1.
  const TensorField grad_uinf = grad_central(d, traj.ext.u_inf);
  const VecField vm = traj.v_at(m);
  const VecField vini = traj.v_at(0);
  for (int i = 0; i < d.cell_count(); ++i) {
    const Vec2 x = d.center(i);
    lhs += traj.rho[m][i] * vm(i, 0) * test.value(tau, x) * vol -
           traj.rho[0][i] * vini(i, 0) * test.value(0.0, x) * vol;
  }
  for (int n = 0; n < m; ++n) {
    const double t = traj.times[n];
    const Field& rho = traj.rho[n];
    const VecField& u = traj.u[n];
    const VecField v = u - traj.ext.u_inf;
    const TensorField grad_u = grad_central(d, u);
    const TensorField s_u = stress(grad_u, d.dim, traj.viscosity);
    const QuarticFlux q = quartic_flux(d, v, traj.epsilon);
    const VecField grad_rho = grad_central(d, traj.epsilon > 0.0 ? traj.rho[n + 1]
                                                                 : traj.rho[n]);
    for (int i = 0; i < d.cell_count(); ++i) {
      const Vec2 x = d.center(i);
      const double phi = test.value(t, x);
      const Vec2 gphi = test.grad(t, x);
      double s = rho[i] * v(i, 0) * test.dt(t, x);
      // rho u.grad(phi e1).u = rho (u.gphi) u_1
      double ugp = 0.0;
      for (int a = 0; a < d.dim; ++a) ugp += u(i, a) * gphi[a];
      s += rho[i] * ugp * u(i, 0);
      // -rho u.grad(u_inf . phi e1) = -rho u.grad(u_inf1 phi)
      for (int a = 0; a < d.dim; ++a)
        s -= rho[i] * u(i, a) *
             (grad_uinf(i, a * d.dim) * phi + traj.ext.u_inf(i, 0) * gphi[a]);
      // p_delta div(phi e1)
      s += hp(traj.law, rho[i]) * gphi[0];
      // -S(grad u):grad(phi e1)
      for (int a = 0; a < d.dim; ++a) s -= s_u(i, a * d.dim) * gphi[a];
      if (traj.epsilon > 0.0) {
        // -Z:grad(phi e1)
        for (int a = 0; a < d.dim; ++a) s -= q.z(i, a * d.dim) * gphi[a];
        // +eps grad rho . grad(u_inf1 phi) - eps grad rho . grad u . (phi e1)
        for (int a = 0; a < d.dim; ++a) {
          s += traj.epsilon * grad_rho(i, a) *
               (grad_uinf(i, a * d.dim) * phi + traj.ext.u_inf(i, 0) * gphi[a]);
          s -= traj.epsilon * grad_rho(i, a) * grad_u(i, a * d.dim) * phi;
        }
      }
      if (traj.forcing) s += rho[i] * traj.forcing(t, x)[0] * phi;
      rhs += s * vol * dt;
    }
  }
  return std::abs(lhs - rhs);
}

PressureProbeReport boundary_pressure_probe(const Trajectory& traj,
                                            const std::vector<double>& h_list,
                                            double alpha, double kappa) {
  if (h_list.size() < 4)
    throw ConfigError("boundary_pressure_probe needs at least 4 h values");
  if (!traj.every_step_stored())
    throw TestConfigError("boundary_pressure_probe needs cadence-1 storage");
  const Domain& d = traj.domain;

  PressureProbeReport rep;
  rep.h_values = h_list;
  if (alpha <= 0.0) {
    const double g = traj.delta > 0.0 ? traj.beta : traj.law.gamma();
    alpha = 2.0 * g / (g + 1.0);
  }
  if (kappa <= 0.0) kappa = 4.0 / 3.0;
  rep.alpha = alpha;
  rep.kappa = kappa;
  rep.predicted_exponent = std::min((alpha - 1.0) / alpha, (kappa - 1.0) / kappa);

  for (double h : h_list) {
    const CellMask collar = inner_collar(d, h);
    double I = 0.0;
    for (int n = 0; n + 1 < traj.steps(); ++n)
      I += integrate(d, traj.law.pressure(traj.rho[n]), collar) * traj.dt;
    rep.integrals.push_back(I);
  }

  // Least-squares fit of log I against log h.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const int k = static_cast<int>(h_list.size());
  for (int i = 0; i < k; ++i) {
    if (!(rep.integrals[i] > 0.0))
      throw NumericError("pressure probe integral vanished; exponent undefined");
    const double X = std::log(h_list[i]);
    const double Y = std::log(rep.integrals[i]);
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
  }
  rep.fitted_exponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return rep;
}

}  // namespace nslab
