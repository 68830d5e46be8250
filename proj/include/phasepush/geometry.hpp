#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phasepush/common.hpp"

namespace phasepush {

/// Physical constants of the reference platform (40 kHz MA40S4S array).
struct TransducerConstants {
  double radius = 0.005;   ///< piston radius r [m]
  double power = 6.8;      ///< pressure amplitude at 1 m on axis, A [Pa m]
  double wavenumber = 732.7;  ///< k [1/m]
};

/// Positions, orientations and constants of an array of N transducers.
class ArrayGeometry {
 public:
  ArrayGeometry(std::vector<Vec3> positions, std::vector<Vec3> normals,
                TransducerConstants constants = {});

  /// rows x cols grid in the z = 0 plane, centered at the origin, facing +z.
  static ArrayGeometry planar_grid(int rows = 8, int cols = 8, double pitch = 0.0105,
                                   TransducerConstants constants = {});

  std::size_t size() const { return positions_.size(); }
  const Vec3& position(std::size_t i) const { return positions_[i]; }
  const Vec3& normal(std::size_t i) const { return normals_[i]; }
  std::span<const Vec3> positions() const { return positions_; }
  std::span<const Vec3> normals() const { return normals_; }

  double radius() const { return constants_.radius; }
  double power() const { return constants_.power; }
  double wavenumber() const { return constants_.wavenumber; }
  const TransducerConstants& constants() const { return constants_; }

 private:
  std::vector<Vec3> positions_;
  std::vector<Vec3> normals_;
  TransducerConstants constants_;
};

/// Wraps an angle into [0, 2*pi).
double wrap_phase(double phi);

/// Per-transducer phase delays in radians, stored wrapped to [0, 2*pi).
class PhaseVector {
 public:
  PhaseVector() = default;
  explicit PhaseVector(std::vector<double> phases);
  static PhaseVector zeros(std::size_t n) { return PhaseVector(std::vector<double>(n, 0.0)); }

  std::size_t size() const { return phases_.size(); }
  double operator[](std::size_t i) const { return phases_[i]; }
  std::span<const double> values() const { return phases_; }
  const std::vector<double>& vector() const { return phases_; }

  friend bool operator==(const PhaseVector&, const PhaseVector&) = default;

 private:
  std::vector<double> phases_;
};

}  // namespace phasepush
