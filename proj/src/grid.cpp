#include "nslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nslab {

namespace {

// Quintic smoothstep: C^2, s(0)=0, s(1)=1, vanishing first and second
// derivatives at both ends.
double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

}  // namespace

Domain build_domain(const DomainConfig& cfg) {
  if (cfg.dim != 1 && cfg.dim != 2)
    throw ConfigError("dimension must be 1 or 2");
  Domain d;
  d.dim = cfg.dim;
  d.lower = cfg.lower;
  d.upper = cfg.upper;
  d.cells = cfg.cells;
  for (int k = 0; k < cfg.dim; ++k) {
    const std::string ax = k == 0 ? "x" : "y";
    if (!(cfg.upper[k] > cfg.lower[k]))
      throw ConfigError("malformed extents on axis " + ax +
                        ": upper must exceed lower");
    if (cfg.cells[k] < 4)
      throw ConfigError("cells_per_axis below minimum (4) on axis " + ax);
    d.spacing[k] = (cfg.upper[k] - cfg.lower[k]) / cfg.cells[k];
  }
  if (cfg.dim == 1) {
    d.cells[1] = 1;
    d.spacing[1] = 0.0;
    d.lower[1] = d.upper[1] = 0.0;
  }
  return d;
}

namespace {

std::vector<Face> enumerate_faces(const Domain& d) {
  std::vector<Face> faces;
  if (d.dim == 1) {
    for (int side : {-1, +1}) {
      Face f;
      f.cell = side < 0 ? 0 : d.cells[0] - 1;
      f.axis = 0;
      f.side = side;
      f.normal = Vec2(static_cast<double>(side), 0.0);
      f.center = Vec2(side < 0 ? d.lower[0] : d.upper[0], 0.0);
      f.measure = 1.0;
      faces.push_back(f);
    }
    return faces;
  }
  const int nx = d.cells[0], ny = d.cells[1];
  for (int iy = 0; iy < ny; ++iy) {
    for (int side : {-1, +1}) {
      Face f;
      f.cell = d.index(side < 0 ? 0 : nx - 1, iy);
      f.axis = 0;
      f.side = side;
      f.normal = Vec2(static_cast<double>(side), 0.0);
      f.center = Vec2(side < 0 ? d.lower[0] : d.upper[0],
                      d.lower[1] + (iy + 0.5) * d.spacing[1]);
      f.measure = d.spacing[1];
      faces.push_back(f);
    }
  }
  for (int ix = 0; ix < nx; ++ix) {
    for (int side : {-1, +1}) {
      Face f;
      f.cell = d.index(ix, side < 0 ? 0 : ny - 1);
      f.axis = 1;
      f.side = side;
      f.normal = Vec2(0.0, static_cast<double>(side));
      f.center = Vec2(d.lower[0] + (ix + 0.5) * d.spacing[0],
                      side < 0 ? d.lower[1] : d.upper[1]);
      f.measure = d.spacing[0];
      faces.push_back(f);
    }
  }
  return faces;
}

}  // namespace

BoundaryPartition classify_boundary(const Domain& domain,
                                    const VelocitySampler& u_b,
                                    const DensitySampler& rho_b) {
  BoundaryPartition p;
  p.faces = enumerate_faces(domain);
  const int nf = p.face_count();
  p.cls.resize(nf);
  p.u_b.setZero(nf, domain.dim);
  p.ub_dot_n.setZero(nf);
  p.rho_b.setConstant(nf, std::numeric_limits<double>::quiet_NaN());
  p.rho_b_sampler = rho_b;
  for (int f = 0; f < nf; ++f) {
    const Vec2 ub = u_b(p.faces[f].center);
    for (int k = 0; k < domain.dim; ++k) p.u_b(f, k) = ub[k];
    const double un = ub.head(domain.dim).dot(p.faces[f].normal.head(domain.dim));
    p.ub_dot_n[f] = un;
    if (un < -BoundaryPartition::tol_class) {
      p.cls[f] = FaceClass::In;
      if (!rho_b)
        throw DataError("boundary face at axis " + std::to_string(p.faces[f].axis) +
                        ", side " + std::to_string(p.faces[f].side) +
                        " is inflow but no rho_B sampler was given");
      p.rho_b[f] = rho_b(0.0, p.faces[f].center);
      if (!(p.rho_b[f] > 0.0))
        throw DataError("rho_B must be positive on inflow faces");
    } else if (un > BoundaryPartition::tol_class) {
      p.cls[f] = FaceClass::Out;
    } else {
      p.cls[f] = FaceClass::Zero;
    }
  }
  return p;
}

namespace {

// 1D lifting: constant inside each boundary collar, quintic blend between.
// The flat region extends two cells past the collar so that the central
// divergence stencil sees exact constants on every collar cell.
VecField extension_1d(const Domain& d, const BoundaryPartition& p, double c) {
  double u_lo = 0.0, u_hi = 0.0;
  for (int f = 0; f < p.face_count(); ++f) {
    if (p.faces[f].side < 0) u_lo = p.u_b(f, 0);
    else u_hi = p.u_b(f, 0);
  }
  const double x0 = d.lower[0], x1 = d.upper[0];
  const double flat = c + 2.0 * d.spacing[0];
  if (!(2.0 * flat < x1 - x0))
    throw ConfigError("collar_width leaves no room for the interior blend");
  VecField u(d.cell_count(), 1);
  for (int i = 0; i < d.cell_count(); ++i) {
    const double x = d.center(i)[0];
    const double t = smoothstep5((x - (x0 + flat)) / (x1 - x0 - 2.0 * flat));
    u(i, 0) = u_lo + (u_hi - u_lo) * t;
  }
  return u;
}

// 2D lifting on the rectangle: per-edge normal-constant extensions combined
// by transfinite interpolation (affine blend plus bilinear corner
// correction). Reproduces constants exactly and matches continuous edge
// data to O(spacing); the collar divergence is audited afterwards.
VecField extension_2d(const Domain& d, const BoundaryPartition& p, double) {
  const int nx = d.cells[0], ny = d.cells[1];
  auto face_value = [&](int axis, int side, int transverse) -> Vec2 {
    // Faces were enumerated x-edges first (iy major), then y-edges.
    int f;
    if (axis == 0) f = 2 * transverse + (side < 0 ? 0 : 1);
    else f = 2 * ny + 2 * transverse + (side < 0 ? 0 : 1);
    return Vec2(p.u_b(f, 0), p.u_b(f, 1));
  };
  // Corner values averaged from the two meeting edges (equal up to O(h)
  // for continuous data).
  auto corner = [&](int sx, int sy) -> Vec2 {
    const Vec2 a = face_value(0, sx, sy < 0 ? 0 : ny - 1);
    const Vec2 b = face_value(1, sy, sx < 0 ? 0 : nx - 1);
    return 0.5 * (a + b);
  };
  const Vec2 c_ll = corner(-1, -1), c_lh = corner(-1, +1);
  const Vec2 c_hl = corner(+1, -1), c_hh = corner(+1, +1);

  VecField u(d.cell_count(), 2);
  for (int i = 0; i < d.cell_count(); ++i) {
    const Vec2 x = d.center(i);
    const int ix = d.ix_of(i), iy = d.iy_of(i);
    const double xi = (x[0] - d.lower[0]) / (d.upper[0] - d.lower[0]);
    const double et = (x[1] - d.lower[1]) / (d.upper[1] - d.lower[1]);
    Vec2 v = (1.0 - xi) * face_value(0, -1, iy) + xi * face_value(0, +1, iy) +
             (1.0 - et) * face_value(1, -1, ix) + et * face_value(1, +1, ix);
    v -= (1.0 - xi) * (1.0 - et) * c_ll + (1.0 - xi) * et * c_lh +
         xi * (1.0 - et) * c_hl + xi * et * c_hh;
    u(i, 0) = v[0];
    u(i, 1) = v[1];
  }
  return u;
}

}  // namespace

ExtensionField build_extension(const Domain& domain,
                               const BoundaryPartition& partition,
                               double collar_width) {
  if (!(collar_width >= 2.0 * domain.max_spacing()))
    throw ConfigError("collar_width must be at least twice the max spacing");
  if (!(collar_width < 0.5 * domain.min_extent()))
    throw ConfigError("collar_width must be below half the min extent");

  ExtensionField e;
  e.collar_width = collar_width;
  e.u_inf = domain.dim == 1 ? extension_1d(domain, partition, collar_width)
                            : extension_2d(domain, partition, collar_width);
  e.div_u_inf = div_central(domain, e.u_inf);

  const CellMask collar = inner_collar(domain, collar_width);
  double worst = 0.0;
  int worst_cell = -1;
  for (int i = 0; i < domain.cell_count(); ++i) {
    if (!collar.member[i]) continue;
    if (e.div_u_inf[i] < worst) {
      worst = e.div_u_inf[i];
      worst_cell = i;
    }
  }
  if (worst < -ExtensionField::tol_div)
    throw ExtensionError("extension divergence audit failed: div u_inf = " +
                         std::to_string(worst) + " at cell " +
                         std::to_string(worst_cell));
  return e;
}

CellMask inner_collar(const Domain& domain, double h) {
  if (!(h > 0.0) || !(h < 0.5 * domain.min_extent()))
    throw ConfigError("collar thickness h must lie in (0, min_extent/2)");
  CellMask m;
  m.member.setConstant(domain.cell_count(), false);
  for (int i = 0; i < domain.cell_count(); ++i)
    m.member[i] = domain.boundary_distance(domain.center(i)) < h;
  return m;
}

double integrate(const Domain& domain, const Field& field) {
  if (field.size() != domain.cell_count())
    throw Error("integrate: field size does not match the grid");
  return field.sum() * domain.cell_volume();
}

double integrate(const Domain& domain, const Field& field, const CellMask& region) {
  if (field.size() != domain.cell_count() ||
      region.member.size() != domain.cell_count())
    throw Error("integrate: field/mask size does not match the grid");
  return region.member.select(field, 0.0).sum() * domain.cell_volume();
}

double mask_measure(const Domain& domain, const CellMask& mask) {
  return mask.count() * domain.cell_volume();
}

double integrate_faces(const BoundaryPartition& partition, const Field& values,
                       FaceClass which) {
  if (values.size() != partition.face_count())
    throw Error("integrate_faces: values size does not match the face list");
  double s = 0.0;
  for (int f = 0; f < partition.face_count(); ++f)
    if (partition.cls[f] == which) s += values[f] * partition.faces[f].measure;
  return s;
}

double integrate_faces(const BoundaryPartition& partition, const Field& values) {
  if (values.size() != partition.face_count())
    throw Error("integrate_faces: values size does not match the face list");
  double s = 0.0;
  for (int f = 0; f < partition.face_count(); ++f)
    s += values[f] * partition.faces[f].measure;
  return s;
}

namespace {

template <bool GhostZero>
void axis_gradient(const Domain& d, const Field& f, int axis, Field& out) {
  const int nx = d.cells[0], ny = d.dim == 2 ? d.cells[1] : 1;
  const double h = d.spacing[axis];
  const int stride = axis == 0 ? 1 : nx;
  const int n_axis = axis == 0 ? nx : ny;
  out.resize(d.cell_count());
  for (int iy = 0; iy < (axis == 0 ? ny : nx); ++iy) {
    for (int i = 0; i < n_axis; ++i) {
      const int idx = axis == 0 ? d.index(i, iy) : d.index(iy, i);
      double lo, hi;
      double den = 2.0 * h;
      if (i == 0) {
        if constexpr (GhostZero) {
          lo = 0.0;
          hi = f[idx + stride];
        } else {
          lo = f[idx];
          hi = f[idx + stride];
          den = h;
        }
      } else if (i == n_axis - 1) {
        if constexpr (GhostZero) {
          lo = f[idx - stride];
          hi = 0.0;
        } else {
          lo = f[idx - stride];
          hi = f[idx];
          den = h;
        }
      } else {
        lo = f[idx - stride];
        hi = f[idx + stride];
      }
      out[idx] = (hi - lo) / den;
    }
  }
}

}  // namespace

VecField grad_central(const Domain& domain, const Field& field) {
  VecField g(domain.cell_count(), domain.dim);
  Field tmp;
  for (int a = 0; a < domain.dim; ++a) {
    axis_gradient<false>(domain, field, a, tmp);
    g.col(a) = tmp;
  }
  return g;
}

VecField grad_ghostzero(const Domain& domain, const Field& field) {
  VecField g(domain.cell_count(), domain.dim);
  Field tmp;
  for (int a = 0; a < domain.dim; ++a) {
    axis_gradient<true>(domain, field, a, tmp);
    g.col(a) = tmp;
  }
  return g;
}

TensorField grad_central(const Domain& domain, const VecField& field) {
  const int dim = domain.dim;
  TensorField g(domain.cell_count(), dim * dim);
  Field tmp;
  for (int b = 0; b < dim; ++b) {
    Field comp = field.col(b);
    for (int a = 0; a < dim; ++a) {
      axis_gradient<false>(domain, comp, a, tmp);
      g.col(a * dim + b) = tmp;
    }
  }
  return g;
}

TensorField grad_ghostzero(const Domain& domain, const VecField& field) {
  const int dim = domain.dim;
  TensorField g(domain.cell_count(), dim * dim);
  Field tmp;
  for (int b = 0; b < dim; ++b) {
    Field comp = field.col(b);
    for (int a = 0; a < dim; ++a) {
      axis_gradient<true>(domain, comp, a, tmp);
      g.col(a * dim + b) = tmp;
    }
  }
  return g;
}

Field div_central(const Domain& domain, const VecField& field) {
  Field d = Field::Zero(domain.cell_count());
  Field tmp;
  for (int a = 0; a < domain.dim; ++a) {
    Field comp = field.col(a);
    axis_gradient<false>(domain, comp, a, tmp);
    d += tmp;
  }
  return d;
}

Field div_flux(const Domain& domain, const BoundaryPartition& partition,
               const VecField& u) {
  // Net outward face-velocity balance per unit volume; interior face
  // velocities are arithmetic means, boundary faces carry u_B.n.
  const int n = domain.cell_count();
  Field d = Field::Zero(n);
  const double vol = domain.cell_volume();
  for (int a = 0; a < domain.dim; ++a) {
    const int nx = domain.cells[0];
    const int stride = a == 0 ? 1 : nx;
    const int n_axis = domain.cells[a];
    const int n_trans = domain.dim == 2 ? domain.cells[1 - a] : 1;
    const double meas = domain.dim == 2 ? domain.spacing[1 - a] : 1.0;
    for (int t = 0; t < n_trans; ++t) {
      for (int i = 0; i + 1 < n_axis; ++i) {
        const int lo = a == 0 ? domain.index(i, t) : domain.index(t, i);
        const int hi = lo + stride;
        const double uf = 0.5 * (u(lo, a) + u(hi, a));
        d[lo] += uf * meas / vol;
        d[hi] -= uf * meas / vol;
      }
    }
  }
  for (int f = 0; f < partition.face_count(); ++f) {
    if (partition.cls[f] == FaceClass::Zero) continue;  // no flux in the scheme
    d[partition.faces[f].cell] +=
        partition.ub_dot_n[f] * partition.faces[f].measure / vol;
  }
  return d;
}

Field face_grad_sq(const Domain& domain, const Field& field) {
  const int n = domain.cell_count();
  Field out = Field::Zero(n);
  for (int a = 0; a < domain.dim; ++a) {
    const int nx = domain.cells[0];
    const int stride = a == 0 ? 1 : nx;
    const int n_axis = domain.cells[a];
    const int n_trans = domain.dim == 2 ? domain.cells[1 - a] : 1;
    const double h = domain.spacing[a];
    for (int t = 0; t < n_trans; ++t) {
      for (int i = 0; i < n_axis; ++i) {
        const int idx = a == 0 ? domain.index(i, t) : domain.index(t, i);
        double s = 0.0;
        if (i > 0) {
          const double g = (field[idx] - field[idx - stride]) / h;
          s += 0.5 * g * g;
        }
        if (i + 1 < n_axis) {
          const double g = (field[idx + stride] - field[idx]) / h;
          s += 0.5 * g * g;
        }
        out[idx] += s;
      }
    }
  }
  return out;
}

double face_grad_pairing(const Domain& domain, const Field& phi, const Field& psi) {
  double s = 0.0;
  const double vol = domain.cell_volume();
  for (int a = 0; a < domain.dim; ++a) {
    const int nx = domain.cells[0];
    const int stride = a == 0 ? 1 : nx;
    const int n_axis = domain.cells[a];
    const int n_trans = domain.dim == 2 ? domain.cells[1 - a] : 1;
    const double h = domain.spacing[a];
    for (int t = 0; t < n_trans; ++t) {
      for (int i = 0; i + 1 < n_axis; ++i) {
        const int lo = a == 0 ? domain.index(i, t) : domain.index(t, i);
        const int hi = lo + stride;
        s += (phi[hi] - phi[lo]) * (psi[hi] - psi[lo]) / (h * h) * vol;
      }
    }
  }
  return s;
}

double l1(const Domain& domain, const Field& f) {
  return f.abs().sum() * domain.cell_volume();
}

}  // namespace nslab
