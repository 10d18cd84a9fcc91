#include "nslab/momentum.hpp"

#include <Eigen/Sparse>

#include <cmath>

namespace nslab {

TensorField stress(const TensorField& grad_u, int dim, const ViscosityParams& visc) {
  TensorField s(grad_u.rows(), dim * dim);
  for (Eigen::Index i = 0; i < grad_u.rows(); ++i) {
    double div = 0.0;
    for (int a = 0; a < dim; ++a) div += grad_u(i, a * dim + a);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        double v = visc.mu * (grad_u(i, a * dim + b) + grad_u(i, b * dim + a));
        if (a == b) v += visc.lambda * div;
        s(i, a * dim + b) = v;
      }
  }
  return s;
}

Field stress_contract(const TensorField& grad_u, const TensorField& grad_w, int dim,
                      const ViscosityParams& visc) {
  const TensorField s = stress(grad_u, dim, visc);
  Field out = Field::Zero(grad_u.rows());
  for (int c = 0; c < dim * dim; ++c) out += s.col(c) * grad_w.col(c);
  return out;
}

double stress_pairing(const Domain& domain, const VecField& u, const VecField& w,
                      const ViscosityParams& visc) {
  double s = 0.0;
  for (int b = 0; b < domain.dim; ++b)
    s += visc.mu * face_grad_pairing(domain, u.col(b), w.col(b));
  if (domain.dim == 1) {
    // 1D: int S(u_x) w_x = (2 mu + lambda) int u_x w_x, all face-based.
    s += (visc.mu + visc.lambda) * face_grad_pairing(domain, u.col(0), w.col(0));
  } else {
    const Field du = div_central(domain, u);
    const Field dw = div_central(domain, w);
    s += (visc.mu + visc.lambda) * integrate(domain, Field(du * dw));
  }
  return s;
}

QuarticFlux quartic_flux(const Domain& domain, const VecField& v, double epsilon) {
  QuarticFlux q;
  const TensorField g = grad_ghostzero(domain, v);
  q.z.resize(g.rows(), g.cols());
  Field norm43 = Field::Zero(g.rows());
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    double g2 = 0.0;
    for (int c = 0; c < g.cols(); ++c) g2 += g(i, c) * g(i, c);
    double zn2 = 0.0;
    for (int c = 0; c < g.cols(); ++c) {
      q.z(i, c) = epsilon * g2 * g(i, c);
      zn2 += q.z(i, c) * q.z(i, c);
    }
    norm43[i] = std::pow(zn2, 2.0 / 3.0);  // |Z|^{4/3}
  }
  q.norm_43 = std::pow(integrate(domain, norm43), 0.75);
  return q;
}

namespace {

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

// Explicit net outflow of upwinded momentum (component b) per unit volume.
// Boundary-layer cells are pinned, so only interior-cell rows are consumed;
// fluxes across grid-boundary faces never enter them.
Field momentum_convection(const Field& rho, const VecField& u, const Domain& d,
                          int b) {
  Field net = Field::Zero(d.cell_count());
  const double vol = d.cell_volume();
  for (int a = 0; a < d.dim; ++a) {
    const int stride = a == 0 ? 1 : d.cells[0];
    const int n_axis = d.cells[a];
    const int n_trans = d.dim == 2 ? d.cells[1 - a] : 1;
    const double meas = d.dim == 2 ? d.spacing[1 - a] : 1.0;
    for (int tr = 0; tr < n_trans; ++tr) {
      for (int i = 0; i + 1 < n_axis; ++i) {
        const int lo = a == 0 ? d.index(i, tr) : d.index(tr, i);
        const int hi = lo + stride;
        const double uf = 0.5 * (u(lo, a) + u(hi, a));
        const int up = uf >= 0.0 ? lo : hi;
        const double flux = uf * rho[up] * u(up, b) * meas;
        net[lo] += flux / vol;
        net[hi] -= flux / vol;
      }
    }
  }
  return net;
}

// Row action of the discrete viscous operator -div S on a velocity field
// with known values everywhere (used for the u_inf contribution and for
// assembling rhs couplings to pinned cells).
VecField viscous_apply(const Domain& d, const VecField& u,
                       const ViscosityParams& visc) {
  const int n = d.cell_count();
  VecField out = VecField::Zero(n, d.dim);
  // mu part: face-based Laplacian per component (plus the extra
  // (mu+lambda) face term in 1D).
  const double mu_face = d.dim == 1 ? 2.0 * visc.mu + visc.lambda : visc.mu;
  for (int b = 0; b < d.dim; ++b) {
    for (int a = 0; a < d.dim; ++a) {
      const int stride = a == 0 ? 1 : d.cells[0];
      const int n_axis = d.cells[a];
      const int n_trans = d.dim == 2 ? d.cells[1 - a] : 1;
      const double h2 = d.spacing[a] * d.spacing[a];
      for (int tr = 0; tr < n_trans; ++tr) {
        for (int i = 0; i + 1 < n_axis; ++i) {
          const int lo = a == 0 ? d.index(i, tr) : d.index(tr, i);
          const int hi = lo + stride;
          const double w = mu_face * (u(hi, b) - u(lo, b)) / h2;
          out(lo, b) -= w;
          out(hi, b) += w;
        }
      }
    }
  }
  if (d.dim == 2) {
    // (mu+lambda) grad(div u), variational form B^T B with central B.
    const Field div = div_central(d, u);
    const VecField gd = grad_central(d, div);
    for (int b = 0; b < 2; ++b)
      out.col(b) -= (visc.mu + visc.lambda) * gd.col(b);
  }
  return out;
}

}  // namespace

VecField step_momentum(const Field& rho_old, const VecField& u_old,
                       const Field& rho_new, const Domain& domain,
                       const ExtensionField& ext, const PressureLaw& law,
                       const MomentumStepConfig& cfg, double t) {
  cfg.viscosity.validate();
  if (!(cfg.dt > 0.0)) throw ConfigError("momentum step needs dt > 0");
  const int n = domain.cell_count();
  const int dim = domain.dim;
  if (rho_old.size() != n || rho_new.size() != n || u_old.rows() != n)
    throw Error("step_momentum: field shape mismatch");
  if (!(rho_new.minCoeff() > 0.0))
    throw SchemeError("step_momentum: updated density is not positive");

  // Explicit right-hand side in conservative variables.
  const Field p_new = law.pressure(rho_new);
  const VecField grad_p = grad_central(domain, p_new);
  const VecField grad_rho = grad_central(domain, rho_new);
  const TensorField grad_u_old = grad_central(domain, u_old);
  const VecField v_old = u_old - ext.u_inf;
  const QuarticFlux q = quartic_flux(domain, v_old, cfg.epsilon);

  VecField m_star(n, dim);
  for (int b = 0; b < dim; ++b) {
    const Field conv = momentum_convection(rho_old, u_old, domain, b);
    Field rhs = rho_old * u_old.col(b) - cfg.dt * conv - cfg.dt * grad_p.col(b);
    if (cfg.epsilon > 0.0) {
      // Compensation term eps grad(rho) . grad(u_b).
      Field comp = Field::Zero(n);
      for (int a = 0; a < dim; ++a)
        comp += grad_rho.col(a) * grad_u_old.col(a * dim + b);
      rhs -= cfg.dt * cfg.epsilon * comp;
      // Quartic dissipation div(Z), central divergence of the cell flux.
      VecField zb(n, dim);
      for (int a = 0; a < dim; ++a) zb.col(a) = q.z.col(a * dim + b);
      rhs += cfg.dt * div_central(domain, zb);
    }
    m_star.col(b) = rhs;
  }
  if (cfg.forcing) {
    for (int i = 0; i < n; ++i) {
      const Vec2 f = cfg.forcing(t, domain.center(i));
      for (int b = 0; b < dim; ++b) m_star(i, b) += cfg.dt * rho_old[i] * f[b];
    }
  }

  // Implicit viscous solve for v = u - u_inf on interior cells; the
  // boundary cell layer carries v = 0.
  const VecField visc_uinf = viscous_apply(domain, ext.u_inf, cfg.viscosity);
  std::vector<int> interior;
  interior.reserve(n);
  Eigen::ArrayXi row_of = Eigen::ArrayXi::Constant(n, -1);
  for (int i = 0; i < n; ++i) {
    if (!domain.is_boundary_cell(i)) {
      row_of[i] = static_cast<int>(interior.size());
      interior.push_back(i);
    }
  }
  const int m = static_cast<int>(interior.size());
  if (m == 0) throw ConfigError("grid too small: no interior cells");

  VecField u_new = ext.u_inf;  // boundary layer exact
  if (domain.dim == 1) {
    const double k = (2.0 * cfg.viscosity.mu + cfg.viscosity.lambda) /
                     (domain.spacing[0] * domain.spacing[0]);
    Field diag(m), lo(m), up(m), rhs(m);
    for (int r = 0; r < m; ++r) {
      const int i = interior[r];
      diag[r] = rho_new[i] / cfg.dt + 2.0 * k;
      lo[r] = r > 0 ? -k : 0.0;
      up[r] = r + 1 < m ? -k : 0.0;
      rhs[r] = m_star(i, 0) / cfg.dt - rho_new[i] * ext.u_inf(i, 0) / cfg.dt -
               visc_uinf(i, 0);
      // Neighbors in the pinned layer contribute v = 0: nothing to add.
    }
    const Field v = solve_tridiagonal(diag, lo, up, rhs);
    for (int r = 0; r < m; ++r) u_new(interior[r], 0) = ext.u_inf(interior[r], 0) + v[r];
  } else {
    // Variational assembly: A = mu FaceLap (x2 components) + (mu+lambda) B^T B vol,
    // B = central divergence with ghost-zero at the interior/pinned interface.
    using T = Eigen::Triplet<double>;
    std::vector<T> trip;
    const double vol = domain.cell_volume();
    auto unknown = [&](int cell, int b) { return 2 * row_of[cell] + b; };
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * m);
    Eigen::VectorXd diag_mass = Eigen::VectorXd::Zero(2 * m);
    for (int r = 0; r < m; ++r) {
      const int i = interior[r];
      for (int b = 0; b < 2; ++b) {
        diag_mass[unknown(i, b)] = rho_new[i] / cfg.dt;
        rhs[unknown(i, b)] = m_star(i, b) / cfg.dt -
                             rho_new[i] * ext.u_inf(i, b) / cfg.dt - visc_uinf(i, b);
      }
    }
    for (int b = 0; b < 2; ++b) {
      for (int a = 0; a < 2; ++a) {
        const int stride = a == 0 ? 1 : domain.cells[0];
        const int n_axis = domain.cells[a];
        const int n_trans = domain.cells[1 - a];
        const double h2 = domain.spacing[a] * domain.spacing[a];
        for (int tr = 0; tr < n_trans; ++tr) {
          for (int i = 0; i + 1 < n_axis; ++i) {
            const int cl = a == 0 ? domain.index(i, tr) : domain.index(tr, i);
            const int ch = cl + stride;
            const bool il = row_of[cl] >= 0, ih = row_of[ch] >= 0;
            const double w = cfg.viscosity.mu / h2;
            if (il) trip.emplace_back(unknown(cl, b), unknown(cl, b), w);
            if (ih) trip.emplace_back(unknown(ch, b), unknown(ch, b), w);
            if (il && ih) {
              trip.emplace_back(unknown(cl, b), unknown(ch, b), -w);
              trip.emplace_back(unknown(ch, b), unknown(cl, b), -w);
            }
          }
        }
      }
    }
    // (mu+lambda) B^T B: B row per cell c couples the central-difference
    // neighbors of each component.
    const double ml = (cfg.viscosity.mu + cfg.viscosity.lambda) * vol;
    std::vector<std::pair<int, double>> brow;
    for (int c = 0; c < n; ++c) {
      brow.clear();
      for (int a = 0; a < 2; ++a) {
        const int stride = a == 0 ? 1 : domain.cells[0];
        const int pos = a == 0 ? domain.ix_of(c) : domain.iy_of(c);
        const int n_axis = domain.cells[a];
        const double den = 2.0 * domain.spacing[a];
        if (pos + 1 < n_axis && row_of[c + stride] >= 0)
          brow.emplace_back(unknown(c + stride, a), 1.0 / den);
        if (pos > 0 && row_of[c - stride] >= 0)
          brow.emplace_back(unknown(c - stride, a), -1.0 / den);
      }
      for (const auto& [ja, wa] : brow)
        for (const auto& [jb, wb] : brow)
          trip.emplace_back(ja, jb, ml * wa * wb);
    }
    for (int r = 0; r < 2 * m; ++r) trip.emplace_back(r, r, diag_mass[r]);
    Eigen::SparseMatrix<double> A(2 * m, 2 * m);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper>
        cg;
    cg.setTolerance(1e-12);
    cg.compute(A);
    Eigen::VectorXd v = cg.solve(rhs);
    if (cg.info() != Eigen::Success)
      throw NumericError("momentum viscous solve did not converge after " +
                         std::to_string(cg.iterations()) + " iterations");
    for (int r = 0; r < m; ++r) {
      const int i = interior[r];
      for (int b = 0; b < 2; ++b) u_new(i, b) = ext.u_inf(i, b) + v[2 * r + b];
    }
  }
  if (!u_new.isFinite().all())
    throw NumericError("step_momentum produced non-finite velocity");
  return u_new;
}

Trajectory run_simulation(const SimCase& sim) {
  if (!(sim.dt > 0.0) || !(sim.t_end > 0.0))
    throw ConfigError("run_simulation needs dt > 0 and t_end > 0");
  if (sim.cadence < 1) throw ConfigError("storage cadence must be >= 1");

  Trajectory traj;
  traj.domain = sim.domain;
  traj.partition = sim.partition;
  traj.ext = sim.ext;
  traj.law = sim.law;
  traj.viscosity = sim.viscosity;
  traj.epsilon = sim.epsilon;
  traj.delta = sim.law.delta();
  traj.beta = sim.law.beta();
  traj.dt = sim.dt;
  traj.forcing = sim.forcing;
  traj.store_cadence = sim.cadence;

  const int nsteps = static_cast<int>(std::llround(sim.t_end / sim.dt));
  if (nsteps < 1) throw ConfigError("t_end shorter than one step");

  Field rho = sim.rho0;
  VecField u = sim.u0;
  double inflow = 0.0, outflow = 0.0;
  double floor_env = rho.minCoeff();
  for (int f = 0; f < sim.partition.face_count(); ++f)
    if (sim.partition.cls[f] == FaceClass::In)
      floor_env = std::min(floor_env, sim.partition.rho_b[f]);

  const double e_total0 =
      0.5 * integrate(sim.domain,
                      Field(rho * (u - sim.ext.u_inf).square().rowwise().sum())) +
      integrate(sim.domain, sim.law.helmholtz(rho));

  auto store = [&](int step, double t) {
    traj.times.push_back(t);
    traj.step_index.push_back(step);
    traj.rho.push_back(rho);
    traj.u.push_back(u);
    traj.inflow_acc.push_back(inflow);
    traj.outflow_acc.push_back(outflow);
    RunLogRow row;
    row.t = t;
    row.mass = integrate(sim.domain, rho);
    const VecField v = u - sim.ext.u_inf;
    row.kinetic = 0.5 * integrate(sim.domain, Field(rho * v.square().rowwise().sum()));
    row.helmholtz = integrate(sim.domain, sim.law.helmholtz(rho));
    row.z_norm = quartic_flux(sim.domain, v, sim.epsilon).norm_43;
    row.min_rho = rho.minCoeff();
    row.max_rho = rho.maxCoeff();
    traj.runlog.push_back(row);
  };
  store(0, 0.0);

  TransportStepConfig tcfg;
  tcfg.epsilon = sim.epsilon;
  tcfg.dt = sim.dt;
  MomentumStepConfig mcfg;
  mcfg.epsilon = sim.epsilon;
  mcfg.dt = sim.dt;
  mcfg.viscosity = sim.viscosity;
  mcfg.forcing = sim.forcing;

  for (int s = 0; s < nsteps; ++s) {
    const double t = s * sim.dt;
    TransportStep ts;
    try {
      ts = step_continuity(rho, u, sim.domain, sim.partition, tcfg, t);
    } catch (const Error& e) {
      throw NumericError("step " + std::to_string(s) + ": " + e.what());
    }
    inflow += ts.inflow_mass;
    outflow += ts.outflow_mass;
    traj.k_history.push_back(ts.div_inf_norm);
    traj.z_norm_history.push_back(
        quartic_flux(sim.domain, VecField(u - sim.ext.u_inf), sim.epsilon).norm_43);

    // Coupling floor from the compounded discrete maximum principle.
    floor_env *= std::max(0.0, 1.0 - sim.dt * ts.div_inf_norm);
    if (ts.rho.minCoeff() < floor_env - 1e-9 * std::abs(floor_env) - 1e-13)
      throw SchemeError("step " + std::to_string(s) +
                        ": density fell below the maximum-principle floor");

    VecField u_new;
    try {
      u_new = step_momentum(rho, u, ts.rho, sim.domain, sim.ext, sim.law, mcfg, t);
    } catch (const Error& e) {
      throw NumericError("step " + std::to_string(s) + ": " + e.what());
    }
    rho = std::move(ts.rho);
    u = std::move(u_new);

    if (!sim.forcing) {
      const VecField v = u - sim.ext.u_inf;
      const double e_total =
          0.5 * integrate(sim.domain, Field(rho * v.square().rowwise().sum())) +
          integrate(sim.domain, sim.law.helmholtz(rho));
      if (e_total > 10.0 * std::abs(e_total0) + 1.0)
        throw SchemeError("step " + std::to_string(s) +
                          ": energy grew beyond budget; reduce dt");
    }

    if ((s + 1) % sim.cadence == 0 || s + 1 == nsteps) store(s + 1, (s + 1) * sim.dt);
  }
  return traj;
}

}  // namespace nslab
