#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "phasepush/bessel.hpp"
#include "phasepush/field.hpp"
#include "phasepush/focus.hpp"
#include "support/field_oracle.hpp"

using namespace phasepush;

namespace {

constexpr double kK = 732.7;
constexpr double kR = 0.005;

std::vector<double> random_phases(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  std::vector<double> out(n);
  for (double& p : out) p = u(rng);
  return out;
}

Vec3 random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lateral(-0.03, 0.03);
  std::uniform_real_distribution<double> height(0.03, 0.1);
  return {lateral(rng), lateral(rng), height(rng)};
}

using testing::direct_sum;

ArrayGeometry perturbed_grid(std::mt19937_64& rng) {
  std::normal_distribution<double> jitter(0.0, 0.001);
  std::normal_distribution<double> tilt(0.0, 0.05);
  const ArrayGeometry base = ArrayGeometry::planar_grid();
  std::vector<Vec3> pos;
  std::vector<Vec3> nrm;
  for (std::size_t i = 0; i < base.size(); ++i) {
    pos.push_back(base.position(i) + Vec3(jitter(rng), jitter(rng), jitter(rng)));
    nrm.push_back(Vec3(tilt(rng), tilt(rng), 1.0).normalized());
  }
  return ArrayGeometry(pos, nrm);
}

}  // namespace

TEST_CASE("directivity") {
  CHECK(directivity(0.0, kK, kR) == 1.0);
  // 2 J1(3.6635) / 3.6635 from mpmath at 40 digits
  CHECK(std::abs(directivity(kPi / 2, kK, kR) - 0.037655516189734943415) < 1e-12);
  for (double theta : {0.01, 0.3, 0.9, 1.4, 2.5}) {
    CHECK(directivity(-theta, kK, kR) == doctest::Approx(directivity(theta, kK, kR)).epsilon(1e-15));
  }
  SUBCASE("small-argument branch is continuous with the Bessel branch") {
    for (double u : {9.9e-5, 1.01e-4}) {
      CHECK(std::abs(piston_directivity(u) - 2.0 * std::cyl_bessel_j(1.0, u) / u) < 1e-15);
    }
    CHECK(std::abs(piston_directivity(1e-4 * (1 - 1e-12)) - piston_directivity(1e-4)) < 1e-15);
  }
}

TEST_CASE("single transducer pressure") {
  const ArrayGeometry one({Vec3::Zero()}, {Vec3(0, 0, 1)});
  CHECK(std::abs(transducer_pressure(one, 0, Vec3(0, 0, 0.068))) ==
        doctest::Approx(100.0).epsilon(1e-12));
  CHECK(std::abs(transducer_pressure(one, 0, Vec3(0, 0, 1.0))) == doctest::Approx(6.8).epsilon(1e-12));

  const Vec3 off(0.013, -0.021, 0.047);
  const double d = off.norm();
  const double arg = std::arg(transducer_pressure(one, 0, off));
  const double expected = std::remainder(kK * d, kTwoPi);
  CHECK(std::abs(std::remainder(arg - expected, kTwoPi)) < 1e-9);

  CHECK_THROWS_AS(transducer_pressure(one, 0, Vec3(0, 0, 1e-10)), DegeneratePointError);
  CHECK_THROWS_AS(transducer_pressure(one, 1, off), DimensionError);
}

TEST_CASE("field superposition") {
  const ArrayGeometry one({Vec3(0.001, 0.002, 0)}, {Vec3(0, 0, 1)});
  const Vec3 x(0.01, 0.0, 0.05);
  for (double phi : {0.0, 1.0, 4.0}) {
    CHECK(std::abs(field_pressure(one, std::vector<double>{phi}, x)) ==
          doctest::Approx(std::abs(transducer_pressure(one, 0, x))).epsilon(1e-14));
  }

  const ArrayGeometry grid = ArrayGeometry::planar_grid();
  const std::vector<double> uniform(grid.size(), 0.3);
  for (double y : {0.004, 0.011, 0.02}) {
    for (double z : {0.03, 0.065}) {
      CHECK(std::abs(field_pressure(grid, uniform, Vec3(0, y, z))) ==
            doctest::Approx(std::abs(field_pressure(grid, uniform, Vec3(0, -y, z)))).epsilon(1e-12));
    }
  }

  SUBCASE("alignment phases reach the closed-form bound") {
    const Vec3 x0(0.007, -0.004, 0.065);
    std::vector<double> phases(grid.size());
    double closed_form = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec3 v = x0 - grid.position(i);
      const double d = v.norm();
      phases[i] = -kK * d;
      closed_form += 6.8 * directivity(std::acos(v.z() / d), kK, kR) / d;
    }
    CHECK(std::abs(field_pressure(grid, phases, x0)) == doctest::Approx(closed_form).epsilon(1e-9));
  }

  CHECK_THROWS_AS(field_pressure(grid, std::vector<double>(3, 0.0), x), DimensionError);
  CHECK_THROWS_AS(field_pressure(grid, uniform, grid.position(5)), DegeneratePointError);
}

TEST_CASE("global phase invariance and alignment bound") {
  std::mt19937_64 rng(11);
  const ArrayGeometry grid = ArrayGeometry::planar_grid();
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 x = random_point(rng);
    std::vector<double> phases = random_phases(rng, grid.size());
    const double base = std::abs(field_pressure(grid, phases, x));
    const double shift = std::uniform_real_distribution<double>(-10, 10)(rng);
    for (double& p : phases) p += shift;
    CHECK(std::abs(field_pressure(grid, phases, x)) == doctest::Approx(base).epsilon(1e-12));
    CHECK(base <= alignment_bound(grid, x) + 1e-9);
  }
}

TEST_CASE("grid scan") {
  const ArrayGeometry grid = ArrayGeometry::planar_grid();
  const std::vector<double> uniform(grid.size(), 0.0);

  GridSpec single;
  single.x = {0.001, 0.0, 1};
  single.y = {0.002, 0.0, 1};
  single.z = {0.05, 0.0, 1};
  const auto one = field_magnitude_grid(grid, uniform, single);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == std::abs(field_pressure(grid, uniform, Vec3(0.001, 0.002, 0.05))));

  // y-z plane at x = 0, 0.5 mm resolution
  GridSpec scan;
  scan.x = {0.0, 0.0, 1};
  scan.y = {-0.03, 0.0005, 121};
  scan.z = {0.04, 0.0005, 161};
  const auto values = field_magnitude_grid(grid, uniform, scan);
  REQUIRE(values.size() == 121 * 161);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > values[peak]) peak = i;
    CHECK(values[i] == doctest::Approx(std::abs(field_pressure(grid, uniform, scan.point(i))))
                           .epsilon(1e-12));
    const std::size_t iy = i % 121;
    const std::size_t mirror = i - iy + (120 - iy);
    CHECK(values[i] == doctest::Approx(values[mirror]).epsilon(1e-12));
  }
  // the brute-force peak of the uniform-phase scan sits on the array axis
  CHECK(std::abs(scan.point(peak).y()) < 1e-12);

  SUBCASE("thread count does not change results") {
    const FieldGrid a = field_grid(grid, uniform, scan, 1);
    const FieldGrid b = field_grid(grid, uniform, scan, 7);
    CHECK(a.values == b.values);
  }

  GridSpec empty = single;
  empty.y.count = 0;
  CHECK_THROWS_AS(field_magnitude_grid(grid, uniform, empty), InvalidArgumentError);
  GridSpec flat = single;
  flat.z = {0.05, 0.0, 4};
  CHECK_THROWS_AS(field_magnitude_grid(grid, uniform, flat), InvalidArgumentError);
}

TEST_CASE("quadratic form structure") {
  const ArrayGeometry grid = ArrayGeometry::planar_grid();
  const QuadraticPressureForm form = quadratic_form(grid, Vec3(0.004, 0.002, 0.065));
  const Eigen::MatrixXd p1 = form.p1();
  const Eigen::MatrixXd p2 = form.p2();
  CHECK((p1 - p1.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((p2 + p2.transpose()).cwiseAbs().maxCoeff() < 1e-9 * p2.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p1);
  const Eigen::VectorXd ev = eig.eigenvalues();
  const double scale = ev.maxCoeff();
  CHECK(ev.minCoeff() > -1e-10 * scale);
  int significant = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) significant += ev[i] > 1e-10 * scale;
  CHECK(significant <= 2);

  // Phi = 0 gives |sum M_i|^2
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) sum += transducer_pressure(grid, i, Vec3(0.004, 0.002, 0.065));
  const std::vector<double> zero(grid.size(), 0.0);
  CHECK(pressure_sq_and_gradient(form, zero, {}) == doctest::Approx(std::norm(sum)).epsilon(1e-12));
}

TEST_CASE("quadratic form equals direct superposition (dense matrices)") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const ArrayGeometry g = perturbed_grid(rng);
    const Vec3 x = random_point(rng);
    const std::vector<double> phases = random_phases(rng, g.size());
    const QuadraticPressureForm form = quadratic_form(g, x);
    Eigen::VectorXd c(g.size());
    Eigen::VectorXd s(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      c[i] = std::cos(phases[i]);
      s[i] = std::sin(phases[i]);
    }
    const double dense = c.dot(form.p1() * c) + s.dot(form.p1() * s) + c.dot(form.p2() * s);
    const double direct = std::norm(direct_sum(g, phases, x));
    CHECK(dense == doctest::Approx(direct).epsilon(1e-9));
    CHECK(pressure_sq_and_gradient(form, phases, {}) == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(99);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const ArrayGeometry g = trial % 2 == 0 ? ArrayGeometry::planar_grid() : perturbed_grid(rng);
    const QuadraticPressureForm form = quadratic_form(g, random_point(rng));
    std::vector<double> phases = random_phases(rng, g.size());
    const auto analytic = pressure_sq_and_gradient(form, phases);
    Eigen::VectorXd fd(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double keep = phases[i];
      phases[i] = keep + h;
      const double up = pressure_sq_and_gradient(form, phases, {});
      phases[i] = keep - h;
      const double down = pressure_sq_and_gradient(form, phases, {});
      phases[i] = keep;
      fd[i] = (up - down) / (2 * h);
    }
    const Eigen::Map<const Eigen::VectorXd> ga(analytic.gradient.data(), g.size());
    CHECK((ga - fd).norm() / ga.norm() < 1e-6);
    // orthogonal to the all-ones direction
    CHECK(std::abs(ga.sum()) < 1e-9 * ga.norm());
  }
}

TEST_CASE("gradient edge cases") {
  const ArrayGeometry one({Vec3::Zero()}, {Vec3(0, 0, 1)});
  const QuadraticPressureForm form = quadratic_form(one, Vec3(0.01, 0.0, 0.04));
  for (double phi : {0.0, 1.3, 5.0}) {
    const auto r = pressure_sq_and_gradient(form, std::vector<double>{phi});
    CHECK(std::abs(r.gradient[0]) < 1e-9);
  }
  const ArrayGeometry grid = ArrayGeometry::planar_grid();
  const QuadraticPressureForm f64 = quadratic_form(grid, Vec3(0, 0, 0.065));
  CHECK_THROWS_AS(pressure_sq_and_gradient(f64, std::vector<double>(63, 0.0)), DimensionError);
}
