#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>

#include "phasepush/geometry.hpp"

namespace phasepush::testing {

// Independent superposition straight from the model definition, using
// acos for the angle and std::cyl_bessel_j for the directivity.
inline std::complex<double> direct_sum(const ArrayGeometry& g, std::span<const double> phases,
                                       const Vec3& x) {
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 v = x - g.position(i);
    const double d = v.norm();
    const double theta = std::acos(std::clamp(g.normal(i).dot(v) / d, -1.0, 1.0));
    const double u = g.wavenumber() * g.radius() * std::sin(theta);
    const double dir = u == 0.0 ? 1.0 : 2.0 * std::cyl_bessel_j(1.0, u) / u;
    sum += g.power() * dir / d * std::exp(std::complex<double>(0.0, g.wavenumber() * d + phases[i]));
  }
  return sum;
}

}  // namespace phasepush::testing
