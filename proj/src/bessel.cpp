#include "phasepush/bessel.hpp"

#include <cmath>

#include "phasepush/common.hpp"

namespace phasepush {
namespace {

constexpr double kSeriesLimit = 8.0;
constexpr double kAsymptoticLimit = 25.0;

double j1_series(double x) {
  const double half = 0.5 * x;
  const double half_sq = half * half;
  double term = half;  // k = 0
  double sum = term;
  for (int k = 1; k < 60; ++k) {
    term *= -half_sq / (static_cast<double>(k) * static_cast<double>(k + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Miller's algorithm: recur downward from a start order well above x, then
// normalize with J0 + 2 * sum J_{2k} = 1.
double j1_miller(double x) {
  int start = static_cast<int>(x) + 40;
  if (start % 2 != 0) ++start;
  double j_next = 0.0;  // J_{n+1}
  double j_curr = 1e-30;  // J_n
  double norm = 0.0;
  double j1 = 0.0;
  for (int n = start; n > 0; --n) {
    const double j_prev = (2.0 * n / x) * j_curr - j_next;
    j_next = j_curr;
    j_curr = j_prev;
    if (std::abs(j_curr) > 1e250) {
      j_curr *= 1e-250;
      j_next *= 1e-250;
      norm *= 1e-250;
      j1 *= 1e-250;
    }
    // j_curr now holds J_{n-1}
    if (n - 1 == 1) j1 = j_curr;
    if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * j_curr;
  }
  norm += j_curr;  // J0
  return j1 / norm;
}

double j1_asymptotic(double x) {
  constexpr double mu = 4.0;  // 4 * order^2
  const double eight_x = 8.0 * x;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * eight_x);
    if (std::abs(term) > last) break;
    last = std::abs(term);
    if (k % 2 == 1) {
      q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    } else {
      p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    }
    if (last < 1e-18) break;
  }
  const double s = std::sin(x);
  const double c = std::cos(x);
  const double cos_chi = (s - c) / std::sqrt(2.0);
  const double sin_chi = -(s + c) / std::sqrt(2.0);
  return std::sqrt(2.0 / (kPi * x)) * (p * cos_chi - q * sin_chi);
}

}  // namespace

double bessel_j1(double x) {
  const double ax = std::abs(x);
  double value;
  if (ax < kSeriesLimit) {
    value = j1_series(ax);
  } else if (ax < kAsymptoticLimit) {
    value = j1_miller(ax);
  } else {
    value = j1_asymptotic(ax);
  }
  return x < 0.0 ? -value : value;
}

}  // namespace phasepush
