#include "nslab/transport.hpp"

#include <Eigen/Sparse>

#include <cmath>

#include "nslab/momentum.hpp"

namespace nslab {

namespace {

// Thomas elimination for the 1D implicit diffusion system.
Field solve_tridiagonal(Field diag, Field lower, Field upper, Field rhs) {
  const Eigen::Index n = diag.size();
  for (Eigen::Index i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  Field x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i)
    x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

// Net convective outflow per cell (flux form, upwinded), volume-scaled, and
// the boundary mass fluxes of this step.
void convective_balance(const Field& rho, const VecField& u, const Domain& d,
                        const BoundaryPartition& p, double t, Field& net,
                        double& inflow, double& outflow) {
  net.setZero(d.cell_count());
  const double vol = d.cell_volume();
  for (int a = 0; a < d.dim; ++a) {
    const int nx = d.cells[0];
    const int stride = a == 0 ? 1 : nx;
    const int n_axis = d.cells[a];
    const int n_trans = d.dim == 2 ? d.cells[1 - a] : 1;
    const double meas = d.dim == 2 ? d.spacing[1 - a] : 1.0;
    for (int tr = 0; tr < n_trans; ++tr) {
      for (int i = 0; i + 1 < n_axis; ++i) {
        const int lo = a == 0 ? d.index(i, tr) : d.index(tr, i);
        const int hi = lo + stride;
        const double uf = 0.5 * (u(lo, a) + u(hi, a));
        const double flux = uf * (uf >= 0.0 ? rho[lo] : rho[hi]) * meas;
        net[lo] += flux / vol;
        net[hi] -= flux / vol;
      }
    }
  }
  inflow = outflow = 0.0;
  for (int f = 0; f < p.face_count(); ++f) {
    const Face& face = p.faces[f];
    switch (p.cls[f]) {
      case FaceClass::In: {
        // Robin condition collapses to the prescribed total flux g = rho_B v.
        const double g = p.rho_b_at(t, f) * p.ub_dot_n[f];  // negative
        net[face.cell] += g * face.measure / vol;
        inflow += -g * face.measure;
        break;
      }
      case FaceClass::Out: {
        const double flux = rho[face.cell] * p.ub_dot_n[f];  // positive
        net[face.cell] += flux * face.measure / vol;
        outflow += flux * face.measure;
        break;
      }
      case FaceClass::Zero:
        break;
    }
  }
}

}  // namespace

TransportStep step_continuity(const Field& rho, const VecField& u,
                              const Domain& domain,
                              const BoundaryPartition& partition,
                              const TransportStepConfig& cfg, double t) {
  if (!(cfg.dt > 0.0)) throw ConfigError("transport step needs dt > 0");
  if (cfg.epsilon < 0.0) throw ConfigError("epsilon must be nonnegative");
  if (rho.size() != domain.cell_count() || u.rows() != domain.cell_count())
    throw Error("step_continuity: field shape mismatch");
  const double umax = u.abs().maxCoeff();
  if (!std::isfinite(umax)) throw NumericError("step_continuity: non-finite velocity");
  const double cfl = cfg.dt * umax / domain.max_spacing();
  if (cfl > TransportStepConfig::cfl_limit + 1e-12)
    throw SchemeError("convective CFL " + std::to_string(cfl) + " exceeds " +
                      std::to_string(TransportStepConfig::cfl_limit));

  TransportStep out;
  Field net;
  convective_balance(rho, u, domain, partition, t, net, out.inflow_mass,
                     out.outflow_mass);
  out.inflow_mass *= cfg.dt;
  out.outflow_mass *= cfg.dt;
  out.div_inf_norm = linf(div_flux(domain, partition, u));

  Field star = rho - cfg.dt * net;

  if (cfg.epsilon > 0.0) {
    const double k = cfg.epsilon * cfg.dt;
    if (domain.dim == 1) {
      const int n = domain.cell_count();
      const double h2 = domain.spacing[0] * domain.spacing[0];
      Field diag = Field::Ones(n), lo = Field::Zero(n), up = Field::Zero(n);
      for (int i = 0; i < n; ++i) {
        if (i > 0) {
          diag[i] += k / h2;
          lo[i] = -k / h2;
        }
        if (i + 1 < n) {
          diag[i] += k / h2;
          up[i] = -k / h2;
        }
      }
      star = solve_tridiagonal(diag, lo, up, star);
    } else {
      const int n = domain.cell_count();
      std::vector<Eigen::Triplet<double>> trip;
      trip.reserve(5 * n);
      Field diag = Field::Ones(n);
      for (int a = 0; a < 2; ++a) {
        const int stride = a == 0 ? 1 : domain.cells[0];
        const int n_axis = domain.cells[a];
        const int n_trans = domain.cells[1 - a];
        const double h2 = domain.spacing[a] * domain.spacing[a];
        for (int tr = 0; tr < n_trans; ++tr) {
          for (int i = 0; i + 1 < n_axis; ++i) {
            const int cl = a == 0 ? domain.index(i, tr) : domain.index(tr, i);
            const int ch = cl + stride;
            diag[cl] += k / h2;
            diag[ch] += k / h2;
            trip.emplace_back(cl, ch, -k / h2);
            trip.emplace_back(ch, cl, -k / h2);
          }
        }
      }
      for (int i = 0; i < n; ++i) trip.emplace_back(i, i, diag[i]);
      Eigen::SparseMatrix<double> A(n, n);
      A.setFromTriplets(trip.begin(), trip.end());
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper>
          cg;
      cg.setTolerance(1e-12);
      cg.compute(A);
      Eigen::VectorXd sol = cg.solve(star.matrix());
      if (cg.info() != Eigen::Success)
        throw NumericError("transport diffusion solve did not converge after " +
                           std::to_string(cg.iterations()) + " iterations");
      star = sol.array();
    }
  }

  const double min_rho = star.minCoeff();
  if (min_rho < -1e-12)
    throw SchemeError("step_continuity produced negative density " +
                      std::to_string(min_rho));
  out.rho = std::move(star);
  return out;
}

int Trajectory::index_of_time(double tau, double tol) const {
  for (int n = 0; n < steps(); ++n)
    if (std::abs(times[n] - tau) <= tol) return n;
  throw Error("requested time " + std::to_string(tau) + " is not a stored step");
}

MaxPrincipleReport max_principle_audit(const Trajectory& traj, double user_k) {
  MaxPrincipleReport rep;
  double lo = traj.rho[0].minCoeff();
  double hi = traj.rho[0].maxCoeff();
  for (int f = 0; f < traj.partition.face_count(); ++f) {
    if (traj.partition.cls[f] != FaceClass::In) continue;
    lo = std::min(lo, traj.partition.rho_b[f]);
    hi = std::max(hi, traj.partition.rho_b[f]);
  }
  rep.rho_lo = lo;
  rep.rho_hi = hi;
  rep.user_k_given = user_k >= 0.0;
  rep.user_k = std::max(user_k, 0.0);

  // Compounded discrete envelope; k_history holds one entry per solver step.
  const double eps_mach = std::numeric_limits<double>::epsilon();
  double env_lo = lo, env_hi = hi;
  int k_cursor = 0;
  for (int n = 0; n < traj.steps(); ++n) {
    while (k_cursor < traj.step_index[n] &&
           k_cursor < static_cast<int>(traj.k_history.size())) {
      const double kdt = traj.k_history[k_cursor] * traj.dt;
      env_lo *= std::max(0.0, 1.0 - kdt);
      env_hi *= 1.0 + kdt;
      ++k_cursor;
    }
    const double slack = 10.0 * eps_mach * env_hi;
    rep.slack = slack;
    const double mn = traj.rho[n].minCoeff();
    const double mx = traj.rho[n].maxCoeff();
    rep.worst_lower_excess = std::max(rep.worst_lower_excess, env_lo - mn);
    rep.worst_upper_excess = std::max(rep.worst_upper_excess, mx - env_hi);
    if (env_lo - mn > slack || mx - env_hi > slack) rep.pass = false;

    if (rep.user_k_given) {
      const double t = traj.times[n];
      const double e_lo = lo * std::exp(-rep.user_k * t);
      const double e_hi = hi * std::exp(rep.user_k * t);
      rep.worst_lower_excess_expk = std::max(rep.worst_lower_excess_expk, e_lo - mn);
      rep.worst_upper_excess_expk = std::max(rep.worst_upper_excess_expk, mx - e_hi);
    }
  }
  return rep;
}

MassReport mass_ledger(const Trajectory& traj) {
  MassReport rep;
  const double mass0 = integrate(traj.domain, traj.rho[0]);
  for (int n = 0; n < traj.steps(); ++n) {
    const double mass = integrate(traj.domain, traj.rho[n]);
    const double res =
        (mass + traj.outflow_acc[n]) - (mass0 + traj.inflow_acc[n]);
    if (std::abs(res) > std::abs(rep.worst_residual)) rep.worst_residual = res;
    if (n + 1 == traj.steps()) {
      rep.mass_t = mass;
      rep.inflow_integral = traj.inflow_acc[n];
      rep.outflow_integral = traj.outflow_acc[n];
      rep.residual = res;
    }
  }
  return rep;
}

RenormFunction renorm_identity() {
  return {[](double z) { return z; }, [](double) { return 1.0; },
          [](double) { return 0.0; }};
}
RenormFunction renorm_constant(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; },
          [](double) { return 0.0; }};
}
RenormFunction renorm_half_square() {
  return {[](double z) { return 0.5 * z * z; }, [](double z) { return z; },
          [](double) { return 1.0; }};
}

namespace {

// Net b-flux balance per cell with the solver's stencils: upwinded b(rho)
// convection, face-difference diffusion of b'(rho) grad rho, prescribed
// b(rho_B) v flux on inflow faces, zero diffusive boundary flux.
void renorm_flux_balance(const Field& rho_conv, const Field& rho_diff,
                         const VecField& u, const Domain& d,
                         const BoundaryPartition& p, const RenormFunction& rb,
                         double eps, double t, Field& net) {
  net.setZero(d.cell_count());
  const double vol = d.cell_volume();
  for (int a = 0; a < d.dim; ++a) {
    const int stride = a == 0 ? 1 : d.cells[0];
    const int n_axis = d.cells[a];
    const int n_trans = d.dim == 2 ? d.cells[1 - a] : 1;
    const double meas = d.dim == 2 ? d.spacing[1 - a] : 1.0;
    const double h = d.spacing[a];
    for (int tr = 0; tr < n_trans; ++tr) {
      for (int i = 0; i + 1 < n_axis; ++i) {
        const int lo = a == 0 ? d.index(i, tr) : d.index(tr, i);
        const int hi = lo + stride;
        const double uf = 0.5 * (u(lo, a) + u(hi, a));
        double flux = uf * rb.b(uf >= 0.0 ? rho_conv[lo] : rho_conv[hi]) * meas;
        if (eps > 0.0) {
          const double dbf = rb.db(0.5 * (rho_diff[lo] + rho_diff[hi]));
          flux -= eps * dbf * (rho_diff[hi] - rho_diff[lo]) / h * meas;
        }
        net[lo] += flux / vol;
        net[hi] -= flux / vol;
      }
    }
  }
  for (int f = 0; f < p.face_count(); ++f) {
    const Face& face = p.faces[f];
    if (p.cls[f] == FaceClass::In) {
      net[face.cell] += rb.b(p.rho_b_at(t, f)) * p.ub_dot_n[f] * face.measure / vol;
    } else if (p.cls[f] == FaceClass::Out) {
      net[face.cell] += rb.b(rho_conv[face.cell]) * p.ub_dot_n[f] * face.measure / vol;
    }
  }
}

}  // namespace

double renorm_residual(const Trajectory& traj, const RenormFunction& rb,
                       const TestField& test) {
  if (!traj.every_step_stored())
    throw TestConfigError("renorm_residual needs a trajectory stored at cadence 1");
  const Domain& d = traj.domain;
  const double vol = d.cell_volume();
  double total = 0.0;
  Field net;
  for (int n = 0; n + 1 < traj.steps(); ++n) {
    const double t = traj.times[n];
    const Field& r0 = traj.rho[n];
    const Field& r1 = traj.rho[n + 1];
    renorm_flux_balance(r0, r1, traj.u[n], d, traj.partition, rb, traj.epsilon, t,
                        net);
    const Field divu = div_flux(d, traj.partition, traj.u[n]);
    Field grad2 = Field::Zero(d.cell_count());
    if (traj.epsilon > 0.0) grad2 = face_grad_sq(d, r1);
    for (int i = 0; i < d.cell_count(); ++i) {
      double resid = (rb.b(r1[i]) - rb.b(r0[i])) / traj.dt + net[i];
      resid += traj.epsilon * rb.ddb(r1[i]) * grad2[i];
      resid += (rb.db(r0[i]) * r0[i] - rb.b(r0[i])) * divu[i];
      total += resid * test.value(t, d.center(i)) * vol * traj.dt;
    }
  }
  return std::abs(total);
}

double l2_identity_audit(const Trajectory& traj) {
  if (!traj.every_step_stored())
    throw TestConfigError("l2_identity_audit needs a trajectory stored at cadence 1");
  const Domain& d = traj.domain;
  const BoundaryPartition& p = traj.partition;
  const int last = traj.steps() - 1;

  const double lhs_final = 0.5 * integrate(d, traj.rho[last].square());
  const double rhs_init = 0.5 * integrate(d, traj.rho[0].square());
  double lhs_boundary = 0.0, lhs_grad = 0.0;
  double rhs_inflow = 0.0, rhs_div = 0.0;
  for (int n = 0; n < last; ++n) {
    const Field& r0 = traj.rho[n];
    const Field& r1 = traj.rho[n + 1];
    for (int f = 0; f < p.face_count(); ++f) {
      const Face& face = p.faces[f];
      const double absun = std::abs(p.ub_dot_n[f]);
      if (p.cls[f] == FaceClass::In) {
        lhs_boundary +=
            0.5 * r0[face.cell] * r0[face.cell] * absun * face.measure * traj.dt;
        rhs_inflow += r0[face.cell] * p.rho_b_at(traj.times[n], f) * absun *
                      face.measure * traj.dt;
      } else if (p.cls[f] == FaceClass::Out) {
        lhs_boundary +=
            0.5 * r0[face.cell] * r0[face.cell] * absun * face.measure * traj.dt;
      }
    }
    if (traj.epsilon > 0.0)
      lhs_grad += traj.epsilon * integrate(d, face_grad_sq(d, r1)) * traj.dt;
    const Field divu = div_flux(d, p, traj.u[n]);
    rhs_div += 0.5 * integrate(d, Field(r0.square() * divu)) * traj.dt;
  }
  return (rhs_init + rhs_inflow - rhs_div) - (lhs_final + lhs_boundary + lhs_grad);
}

}  // namespace nslab
