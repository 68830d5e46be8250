#include "phasepush/geometry.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace phasepush {

ArrayGeometry::ArrayGeometry(std::vector<Vec3> positions, std::vector<Vec3> normals,
                             TransducerConstants constants)
    : positions_(std::move(positions)), normals_(std::move(normals)), constants_(constants) {
  if (positions_.empty()) throw InvalidArgumentError("array geometry needs at least one transducer");
  if (positions_.size() != normals_.size()) {
    throw DimensionError("array geometry: " + std::to_string(positions_.size()) +
                         " positions but " + std::to_string(normals_.size()) + " normals");
  }
  for (std::size_t i = 0; i < normals_.size(); ++i) {
    if (std::abs(normals_[i].norm() - 1.0) > 1e-12) {
      throw InvalidArgumentError("array geometry: normal " + std::to_string(i) + " is not unit length");
    }
    if (!positions_[i].allFinite()) {
      throw InvalidArgumentError("array geometry: position " + std::to_string(i) + " is not finite");
    }
  }
  if (!(constants_.radius > 0.0) || !(constants_.power > 0.0) || !(constants_.wavenumber > 0.0)) {
    throw InvalidArgumentError("array geometry: radius, power and wavenumber must be positive");
  }
}

ArrayGeometry ArrayGeometry::planar_grid(int rows, int cols, double pitch,
                                         TransducerConstants constants) {
  if (rows < 1 || cols < 1) throw InvalidArgumentError("planar grid needs rows, cols >= 1");
  if (!(pitch > 0.0)) throw InvalidArgumentError("planar grid pitch must be positive");
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  positions.reserve(static_cast<std::size_t>(rows * cols));
  const double x0 = -0.5 * (cols - 1) * pitch;
  const double y0 = -0.5 * (rows - 1) * pitch;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      positions.emplace_back(x0 + c * pitch, y0 + r * pitch, 0.0);
      normals.emplace_back(0.0, 0.0, 1.0);
    }
  }
  return ArrayGeometry(std::move(positions), std::move(normals), constants);
}

double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a tiny negative number can round up to exactly 2*pi
  if (w >= kTwoPi) w = 0.0;
  return w;
}

PhaseVector::PhaseVector(std::vector<double> phases) : phases_(std::move(phases)) {
  for (double& p : phases_) p = wrap_phase(p);
}

}  // namespace phasepush
