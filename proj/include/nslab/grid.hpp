#pragma once

#include <functional>
#include <vector>

#include "nslab/types.hpp"

namespace nslab {

// Uniform colocated grid on an interval (dim 1) or an axis-aligned
// rectangle (dim 2). Density and velocity live at cell centers; boundary
// data is sampled at face centers.
struct Domain {
  int dim = 1;
  Eigen::Array2d lower = Eigen::Array2d::Zero();
  Eigen::Array2d upper = Eigen::Array2d::Zero();
  Eigen::Array2i cells = Eigen::Array2i::Ones();
  Eigen::Array2d spacing = Eigen::Array2d::Zero();

  int cell_count() const { return dim == 1 ? cells[0] : cells[0] * cells[1]; }
  double cell_volume() const {
    return dim == 1 ? spacing[0] : spacing[0] * spacing[1];
  }
  double volume() const {
    double v = upper[0] - lower[0];
    if (dim == 2) v *= upper[1] - lower[1];
    return v;
  }
  double min_extent() const {
    double e = upper[0] - lower[0];
    if (dim == 2) e = std::min(e, upper[1] - lower[1]);
    return e;
  }
  double max_spacing() const {
    return dim == 1 ? spacing[0] : spacing.head(2).maxCoeff();
  }

  int index(int ix, int iy = 0) const { return ix + cells[0] * iy; }
  int ix_of(int idx) const { return idx % cells[0]; }
  int iy_of(int idx) const { return idx / cells[0]; }

  // Center coordinate of cell `idx`; component 1 is 0 in 1D.
  Vec2 center(int idx) const {
    Vec2 x = Vec2::Zero();
    x[0] = lower[0] + (ix_of(idx) + 0.5) * spacing[0];
    if (dim == 2) x[1] = lower[1] + (iy_of(idx) + 0.5) * spacing[1];
    return x;
  }

  // Distance from a point to the domain boundary.
  double boundary_distance(const Vec2& x) const {
    double d = std::min(x[0] - lower[0], upper[0] - x[0]);
    if (dim == 2) d = std::min({d, x[1] - lower[1], upper[1] - x[1]});
    return d;
  }

  bool is_boundary_cell(int idx) const {
    int ix = ix_of(idx);
    if (ix == 0 || ix == cells[0] - 1) return true;
    if (dim == 2) {
      int iy = iy_of(idx);
      if (iy == 0 || iy == cells[1] - 1) return true;
    }
    return false;
  }
};

struct DomainConfig {
  int dim = 1;
  Eigen::Array2d lower = Eigen::Array2d::Zero();
  Eigen::Array2d upper = Eigen::Array2d::Zero();
  Eigen::Array2i cells = Eigen::Array2i::Zero();
};

Domain build_domain(const DomainConfig& cfg);

// One boundary face of one boundary cell.
struct Face {
  int cell = 0;      // adjacent cell index
  int axis = 0;      // normal axis
  int side = -1;     // -1 low end, +1 high end
  Vec2 normal = Vec2::Zero();
  Vec2 center = Vec2::Zero();
  double measure = 1.0;  // 1 in 1D, transverse spacing in 2D
};

enum class FaceClass { In, Out, Zero };

// Samplers for boundary data. Velocity traces are static in time; the
// inflow density may depend on time.
using VelocitySampler = std::function<Vec2(const Vec2&)>;
using DensitySampler = std::function<double(double, const Vec2&)>;

// Boundary faces with their in/out/zero classification, the velocity trace
// u_B and the inflow density trace rho_B (inflow faces only).
struct BoundaryPartition {
  std::vector<Face> faces;
  std::vector<FaceClass> cls;
  VecField u_b;     // faces x dim
  Field ub_dot_n;   // faces
  Field rho_b;      // faces; NaN off the inflow part
  DensitySampler rho_b_sampler;  // empty when there is no inflow

  // Classification tolerance on u_B.n at face centers.
  static constexpr double tol_class = 1e-12;

  int face_count() const { return static_cast<int>(faces.size()); }
  bool has_class(FaceClass c) const {
    for (auto k : cls)
      if (k == c) return true;
    return false;
  }
  double rho_b_at(double t, int f) const {
    return rho_b_sampler ? rho_b_sampler(t, faces[f].center) : rho_b[f];
  }
};

BoundaryPartition classify_boundary(const Domain& domain,
                                    const VelocitySampler& u_b,
                                    const DensitySampler& rho_b = {});

// Interior lifting u_inf of the boundary velocity. Its divergence must be
// nonnegative (up to tol_div) on the boundary collar; build_extension
// fails loudly when the audit does not pass.
struct ExtensionField {
  VecField u_inf;       // cells x dim
  double collar_width = 0.0;
  Field div_u_inf;      // cells

  static constexpr double tol_div = 1e-10;
};

ExtensionField build_extension(const Domain& domain,
                               const BoundaryPartition& partition,
                               double collar_width);

// Cells whose center lies within distance h of the boundary.
struct CellMask {
  Mask member;

  int count() const { return static_cast<int>(member.count()); }
};

CellMask inner_collar(const Domain& domain, double h);

// Midpoint-rule quadratures.
double integrate(const Domain& domain, const Field& field);
double integrate(const Domain& domain, const Field& field, const CellMask& region);
double mask_measure(const Domain& domain, const CellMask& mask);

// Boundary quadrature of per-face values restricted to one class.
double integrate_faces(const BoundaryPartition& partition, const Field& values,
                       FaceClass which);
double integrate_faces(const BoundaryPartition& partition, const Field& values);

// --- discrete differential operators ------------------------------------
//
// grad_central: central differences, one-sided at the first/last cells.
// grad_ghostzero: central differences with zero extension outside the
// grid; the natural gradient for fields vanishing on the boundary layer.
// div_flux: flux-form divergence (face-difference), boundary faces closed
// with the boundary velocity trace; this is the stencil the transport
// solver induces and the one used for maximum-principle bookkeeping.

VecField grad_central(const Domain& domain, const Field& field);
VecField grad_ghostzero(const Domain& domain, const Field& field);
TensorField grad_central(const Domain& domain, const VecField& field);
TensorField grad_ghostzero(const Domain& domain, const VecField& field);
Field div_central(const Domain& domain, const VecField& field);
Field div_flux(const Domain& domain, const BoundaryPartition& partition,
               const VecField& u);

// Face-gradient squared norm per cell: mean over per-axis face pairs of the
// squared face differences, zero contribution at the domain boundary faces.
Field face_grad_sq(const Domain& domain, const Field& field);

// Sum over interior faces of (D phi)(D psi) * face measure. The quadratic
// form behind the viscous solve and the discrete Korn bound.
double face_grad_pairing(const Domain& domain, const Field& phi, const Field& psi);

inline double linf(const Field& f) { return f.abs().maxCoeff(); }
double l1(const Domain& domain, const Field& f);

}  // namespace nslab
