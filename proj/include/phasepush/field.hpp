#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "phasepush/geometry.hpp"

namespace phasepush {

using ComplexPressure = std::complex<double>;

/// Closest allowed distance between an evaluation point and a transducer.
inline constexpr double kMinTransducerDistance = 1e-9;

/// Far-field circular piston pattern 2*J1(u)/u as a function of u = k*r*sin(theta).
double piston_directivity(double u);

/// Directivity of a piston of radius r at angle theta off its axis.
double directivity(double theta, double wavenumber, double radius);

/// Zero-phase complex pressure M_i(x) of one transducer.
ComplexPressure transducer_pressure(const ArrayGeometry& geometry, std::size_t index,
                                    const Vec3& point);

/// Superposition sum_i M_i(x) exp(j phi_i).
ComplexPressure field_pressure(const ArrayGeometry& geometry, std::span<const double> phases,
                               const Vec3& point);
inline ComplexPressure field_pressure(const ArrayGeometry& geometry, const PhaseVector& phases,
                                      const Vec3& point) {
  return field_pressure(geometry, phases.values(), point);
}

/// One sampled axis of a scan: `count` samples start, start + step, ...
struct GridAxis {
  double start = 0.0;
  double step = 0.0;
  std::size_t count = 1;
};

/// Axis-aligned sampling box. Samples are stored row-major with z slowest
/// and x fastest.
struct GridSpec {
  GridAxis x;
  GridAxis y;
  GridAxis z;

  std::size_t size() const { return x.count * y.count * z.count; }
  Vec3 point(std::size_t index) const;
};

struct FieldGrid {
  GridSpec spec;
  std::vector<ComplexPressure> values;

  Vec3 point(std::size_t index) const { return spec.point(index); }
  std::vector<double> magnitudes() const;
};

/// Complex pressure sampled on a grid. Work is split over `threads` workers
/// (0 picks the hardware concurrency); every point is accumulated in the same
/// order regardless of the split.
FieldGrid field_grid(const ArrayGeometry& geometry, std::span<const double> phases,
                     const GridSpec& grid, unsigned threads = 0);

/// |p| sampled on a grid, row-major as in GridSpec.
std::vector<double> field_magnitude_grid(const ArrayGeometry& geometry,
                                         std::span<const double> phases, const GridSpec& grid,
                                         unsigned threads = 0);

/// Real quadratic-form representation of |p|^2 at a fixed point.
///
/// Holds the N x 2 matrix p = [Re m, Im m]. With c = cos(phi) and s = sin(phi)
/// elementwise, |p|^2 = c'P1c + s'P1s + c'P2s where P1 = p p' and
/// P2 = p [[0,-2],[2,0]] p'. Both matrices have rank <= 2 and are only formed
/// explicitly on request.
class QuadraticPressureForm {
 public:
  QuadraticPressureForm(Eigen::VectorXd real_part, Eigen::VectorXd imag_part);

  std::size_t size() const { return static_cast<std::size_t>(real_.size()); }
  const Eigen::VectorXd& real_part() const { return real_; }
  const Eigen::VectorXd& imag_part() const { return imag_; }

  /// The N x 2 matrix p.
  Eigen::MatrixXd p() const;
  Eigen::MatrixXd p1() const;
  Eigen::MatrixXd p2() const;

 private:
  Eigen::VectorXd real_;
  Eigen::VectorXd imag_;
};

QuadraticPressureForm quadratic_form(const ArrayGeometry& geometry, const Vec3& point);

/// |p|^2 at the form's point and writes d|p|^2/dphi into `gradient`.
/// Runs in O(N); `gradient` may be empty to skip it.
double pressure_sq_and_gradient(const QuadraticPressureForm& form, std::span<const double> phases,
                                std::span<double> gradient);

struct PressureSqGradient {
  double value;
  std::vector<double> gradient;
};

PressureSqGradient pressure_sq_and_gradient(const QuadraticPressureForm& form,
                                            std::span<const double> phases);

}  // namespace phasepush
