#include "nslab/samplers.hpp"

#include <cmath>

namespace nslab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double eval_spec(const SamplerSpec& s, double tangent) {
  auto p = [&](size_t i, double def = 0.0) {
    return i < s.params.size() ? s.params[i] : def;
  };
  if (s.kind == "constant") return p(0);
  if (s.kind == "linear") return p(0) + p(1) * tangent;
  if (s.kind == "sinusoidal")
    return p(0) + p(1) * std::sin(2.0 * kPi * p(2, 1.0) * tangent);
  throw ConfigError("unknown sampler kind '" + s.kind + "'");
}

// Tangential coordinate of a boundary point: the coordinate along the face.
double tangent_coord(const Domain& d, const Vec2& x) {
  if (d.dim == 1) return 0.0;
  // On x-normal edges the tangent is y, on y-normal edges it is x; pick the
  // coordinate that is not pinned to an extent endpoint.
  const double ex = std::min(std::abs(x[0] - d.lower[0]), std::abs(d.upper[0] - x[0]));
  const double ey = std::min(std::abs(x[1] - d.lower[1]), std::abs(d.upper[1] - x[1]));
  return ex <= ey ? x[1] : x[0];
}

}  // namespace

double unit_bump(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double s = 1.0 - std::abs(2.0 * t - 1.0);
  const double q = s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
  return q;
}

VelocitySampler make_velocity_sampler(const Domain& domain,
                                      const std::vector<SamplerSpec>& per_component) {
  if (static_cast<int>(per_component.size()) != domain.dim)
    throw ConfigError("velocity sampler needs one spec per dimension");
  return [specs = per_component, domain](const Vec2& x) {
    Vec2 u = Vec2::Zero();
    const double t = tangent_coord(domain, x);
    for (size_t k = 0; k < specs.size(); ++k) u[static_cast<int>(k)] = eval_spec(specs[k], t);
    return u;
  };
}

DensitySampler make_density_sampler(const Domain& domain, const SamplerSpec& spec) {
  return [spec, domain](double, const Vec2& x) {
    return eval_spec(spec, tangent_coord(domain, x));
  };
}

Field make_initial_density(const Domain& domain, const SamplerSpec& spec) {
  Field rho(domain.cell_count());
  auto p = [&](size_t i, double def = 0.0) {
    return i < spec.params.size() ? spec.params[i] : def;
  };
  for (int i = 0; i < domain.cell_count(); ++i) {
    const Vec2 x = domain.center(i);
    const double t0 = (x[0] - domain.lower[0]) / (domain.upper[0] - domain.lower[0]);
    if (spec.kind == "constant") {
      rho[i] = p(0);
    } else if (spec.kind == "bump") {
      double v = unit_bump(t0);
      if (domain.dim == 2) {
        const double t1 = (x[1] - domain.lower[1]) / (domain.upper[1] - domain.lower[1]);
        v *= unit_bump(t1);
      }
      rho[i] = p(0) + p(1) * v;
    } else if (spec.kind == "sinusoid") {
      rho[i] = p(0) + p(1) * std::sin(2.0 * kPi * p(2, 1.0) * t0);
    } else {
      throw ConfigError("unknown initial-density kind '" + spec.kind + "'");
    }
  }
  return rho;
}

VecField make_initial_velocity(const Domain& domain,
                               const std::vector<SamplerSpec>& per_component) {
  if (static_cast<int>(per_component.size()) != domain.dim)
    throw ConfigError("initial velocity needs one spec per dimension");
  VecField u(domain.cell_count(), domain.dim);
  for (int k = 0; k < domain.dim; ++k) {
    SamplerSpec s = per_component[k];
    if (s.kind == "sinusoidal") s.kind = "sinusoid";
    u.col(k) = make_initial_density(domain, s);
  }
  return u;
}

}  // namespace nslab
