#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace phasepush {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field evaluated at (or numerically on top of) a transducer face.
class DegeneratePointError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// Requested pressure exceeds what any phase vector can produce at the point.
class UnachievableTargetError : public Error {
 public:
  using Error::Error;
};

/// Every optimizer restart exhausted its iteration budget above tolerance.
class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace phasepush
