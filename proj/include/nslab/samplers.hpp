#pragma once

#include <string>
#include <vector>

#include "nslab/grid.hpp"

namespace nslab {

// Named boundary-data catalog. A velocity spec gives one entry per
// component; density specs are scalar. Supported kinds:
//   constant c
//   linear c0 c1            (c0 + c1 * tangential coordinate)
//   sinusoidal c0 amp freq  (c0 + amp * sin(2*pi*freq*tangential coordinate))
// The tangential coordinate is 0 in 1D.
struct SamplerSpec {
  std::string kind = "constant";
  std::vector<double> params;
};

VelocitySampler make_velocity_sampler(const Domain& domain,
                                      const std::vector<SamplerSpec>& per_component);
DensitySampler make_density_sampler(const Domain& domain, const SamplerSpec& spec);

// Initial-condition catalog on cell centers:
//   constant c
//   bump c amp          (c + amp * compact quintic bump in the interior)
//   sinusoid c amp freq (c + amp * sin(2*pi*freq*(x-lower)/extent), per axis 0)
Field make_initial_density(const Domain& domain, const SamplerSpec& spec);
VecField make_initial_velocity(const Domain& domain,
                               const std::vector<SamplerSpec>& per_component);

// Smooth compactly supported bump on (0,1), C^2, max 1 at the midpoint.
double unit_bump(double t);

}  // namespace nslab
