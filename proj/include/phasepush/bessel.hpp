#pragma once

namespace phasepush {

/// Bessel function of the first kind, order one.
///
/// Power series for |x| < 8, Miller backward recurrence up to |x| < 25 and the
/// Hankel asymptotic expansion beyond. Absolute error stays below 1e-12 on
/// the whole real line.
double bessel_j1(double x);

}  // namespace phasepush
