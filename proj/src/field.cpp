#include "phasepush/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "phasepush/bessel.hpp"

namespace phasepush {

double piston_directivity(double u) {
  if (std::abs(u) < 1e-4) {
    const double u2 = u * u;
    return 1.0 - u2 / 8.0 + u2 * u2 / 192.0;
  }
  return 2.0 * bessel_j1(u) / u;
}

double directivity(double theta, double wavenumber, double radius) {
  return piston_directivity(wavenumber * radius * std::sin(theta));
}

namespace {

struct Path {
  double distance;
  double sin_theta;
};

Path path_to(const ArrayGeometry& geometry, std::size_t index, const Vec3& point) {
  const Vec3 offset = point - geometry.position(index);
  const double d = offset.norm();
  if (!(d >= kMinTransducerDistance)) {
    throw DegeneratePointError("evaluation point lies on transducer " + std::to_string(index) +
                               " (distance " + std::to_string(d) + " m)");
  }
  return {d, geometry.normal(index).cross(offset).norm() / d};
}

ComplexPressure zero_phase_pressure(const ArrayGeometry& geometry, std::size_t index,
                                    const Vec3& point) {
  const Path path = path_to(geometry, index, point);
  const double k = geometry.wavenumber();
  const double amplitude = geometry.power() *
                           piston_directivity(k * geometry.radius() * path.sin_theta) /
                           path.distance;
  const double arg = k * path.distance;
  return {amplitude * std::cos(arg), amplitude * std::sin(arg)};
}

}  // namespace

ComplexPressure transducer_pressure(const ArrayGeometry& geometry, std::size_t index,
                                    const Vec3& point) {
  if (index >= geometry.size()) {
    throw DimensionError("transducer index " + std::to_string(index) + " out of range");
  }
  return zero_phase_pressure(geometry, index, point);
}

ComplexPressure field_pressure(const ArrayGeometry& geometry, std::span<const double> phases,
                               const Vec3& point) {
  if (phases.size() != geometry.size()) {
    throw DimensionError("phase vector has " + std::to_string(phases.size()) +
                         " entries, geometry has " + std::to_string(geometry.size()));
  }
  ComplexPressure sum{0.0, 0.0};
  for (std::size_t i = 0; i < geometry.size(); ++i) {
    sum += zero_phase_pressure(geometry, i, point) * std::polar(1.0, phases[i]);
  }
  return sum;
}

Vec3 GridSpec::point(std::size_t index) const {
  const std::size_t ix = index % x.count;
  const std::size_t iy = (index / x.count) % y.count;
  const std::size_t iz = index / (x.count * y.count);
  return {x.start + static_cast<double>(ix) * x.step, y.start + static_cast<double>(iy) * y.step,
          z.start + static_cast<double>(iz) * z.step};
}

std::vector<double> FieldGrid::magnitudes() const {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [](const ComplexPressure& p) { return std::abs(p); });
  return out;
}

FieldGrid field_grid(const ArrayGeometry& geometry, std::span<const double> phases,
                     const GridSpec& grid, unsigned threads) {
  for (const GridAxis* axis : {&grid.x, &grid.y, &grid.z}) {
    if (axis->count == 0) throw InvalidArgumentError("grid has an axis with zero samples");
    if (axis->count > 1 && !(axis->step > 0.0)) {
      throw InvalidArgumentError("grid spacing must be positive");
    }
  }
  if (phases.size() != geometry.size()) {
    throw DimensionError("phase vector does not match geometry");
  }
  FieldGrid out{grid, std::vector<ComplexPressure>(grid.size())};
  const std::size_t total = out.values.size();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out.values[i] = field_pressure(geometry, phases, grid.point(i));
    }
  };
  if (threads <= 1) {
    work(0, total);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(total, begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<double> field_magnitude_grid(const ArrayGeometry& geometry,
                                         std::span<const double> phases, const GridSpec& grid,
                                         unsigned threads) {
  return field_grid(geometry, phases, grid, threads).magnitudes();
}

QuadraticPressureForm::QuadraticPressureForm(Eigen::VectorXd real_part, Eigen::VectorXd imag_part)
    : real_(std::move(real_part)), imag_(std::move(imag_part)) {
  if (real_.size() != imag_.size()) throw DimensionError("quadratic form: part sizes differ");
}

Eigen::MatrixXd QuadraticPressureForm::p() const {
  Eigen::MatrixXd m(real_.size(), 2);
  m.col(0) = real_;
  m.col(1) = imag_;
  return m;
}

Eigen::MatrixXd QuadraticPressureForm::p1() const {
  const Eigen::MatrixXd m = p();
  return m * m.transpose();
}

Eigen::MatrixXd QuadraticPressureForm::p2() const {
  const Eigen::MatrixXd m = p();
  Eigen::Matrix2d rot;
  rot << 0.0, -2.0, 2.0, 0.0;
  return m * rot * m.transpose();
}

QuadraticPressureForm quadratic_form(const ArrayGeometry& geometry, const Vec3& point) {
  const auto n = static_cast<Eigen::Index>(geometry.size());
  Eigen::VectorXd re(n);
  Eigen::VectorXd im(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ComplexPressure m = zero_phase_pressure(geometry, static_cast<std::size_t>(i), point);
    re[i] = m.real();
    im[i] = m.imag();
  }
  return {std::move(re), std::move(im)};
}

double pressure_sq_and_gradient(const QuadraticPressureForm& form, std::span<const double> phases,
                                std::span<double> gradient) {
  const std::size_t n = form.size();
  if (phases.size() != n) {
    throw DimensionError("phase vector has " + std::to_string(phases.size()) +
                         " entries, form has " + std::to_string(n));
  }
  if (!gradient.empty() && gradient.size() != n) {
    throw DimensionError("gradient buffer does not match the form size");
  }
  const double* mr = form.real_part().data();
  const double* mi = form.imag_part().data();

  // pc = p' c and ps = p' s
  double pc0 = 0.0, pc1 = 0.0, ps0 = 0.0, ps1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(phases[i]);
    const double s = std::sin(phases[i]);
    pc0 += mr[i] * c;
    pc1 += mi[i] * c;
    ps0 += mr[i] * s;
    ps1 += mi[i] * s;
  }
  const double value = pc0 * pc0 + pc1 * pc1 + ps0 * ps0 + ps1 * ps1 - 2.0 * pc0 * ps1 +
                       2.0 * pc1 * ps0;
  if (gradient.empty()) return value;

  // 2 (diag(c) p J - diag(s) p) p'c + 2 (diag(c) p + diag(s) p J) p's, J = [[0,1],[-1,0]]
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(phases[i]);
    const double s = std::sin(phases[i]);
    const double rot_c = -mi[i] * pc0 + mr[i] * pc1;  // (p J)_i . pc
    const double row_c = mr[i] * pc0 + mi[i] * pc1;   // p_i . pc
    const double rot_s = -mi[i] * ps0 + mr[i] * ps1;
    const double row_s = mr[i] * ps0 + mi[i] * ps1;
    gradient[i] = 2.0 * (c * rot_c - s * row_c) + 2.0 * (c * row_s + s * rot_s);
  }
  return value;
}

PressureSqGradient pressure_sq_and_gradient(const QuadraticPressureForm& form,
                                            std::span<const double> phases) {
  PressureSqGradient out{0.0, std::vector<double>(form.size())};
  out.value = pressure_sq_and_gradient(form, phases, out.gradient);
  return out;
}

}  // namespace phasepush
