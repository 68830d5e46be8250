#include "phasepush/reference.hpp"

#include <algorithm>
#include <cmath>

namespace phasepush {

const char* to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::kSetpoint: return "setpoint";
    case ReferenceKind::kCircle: return "circle";
    case ReferenceKind::kEightFigure: return "eight";
    case ReferenceKind::kWaypoints: return "waypoints";
  }
  return "unknown";
}

ReferenceKind reference_kind_from_string(const std::string& name) {
  if (name == "setpoint") return ReferenceKind::kSetpoint;
  if (name == "circle") return ReferenceKind::kCircle;
  if (name == "eight") return ReferenceKind::kEightFigure;
  if (name == "waypoints") return ReferenceKind::kWaypoints;
  throw ConfigError("unknown reference kind '" + name + "'");
}

double eight_figure_lap_length(double a, double b) {
  constexpr int kIntervals = 4096;  // even
  const double h = kTwoPi / kIntervals;
  auto speed = [&](double s) {
    const double dx = a * std::cos(s);
    const double dy = 2.0 * b * std::cos(2.0 * s);
    return std::sqrt(dx * dx + dy * dy);
  };
  double sum = speed(0.0) + speed(kTwoPi);
  for (int i = 1; i < kIntervals; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * speed(i * h);
  return sum * h / 3.0;
}

ReferenceTrajectory::ReferenceTrajectory(ReferenceSpec spec) : spec_(std::move(spec)) {
  const bool moving = spec_.kind != ReferenceKind::kSetpoint;
  if (moving && !(spec_.speed > 0.0)) throw ConfigError("reference speed must be positive");
  switch (spec_.kind) {
    case ReferenceKind::kSetpoint:
      break;
    case ReferenceKind::kCircle:
      if (!(spec_.radius > 0.0)) throw ConfigError("circle radius must be positive");
      omega_ = spec_.speed / spec_.radius;
      period_ = kTwoPi / omega_;
      break;
    case ReferenceKind::kEightFigure: {
      if (!(spec_.extent.x() > 0.0) || !(spec_.extent.y() > 0.0)) {
        throw ConfigError("eight-figure extents must be positive");
      }
      const double lap = eight_figure_lap_length(spec_.extent.x(), spec_.extent.y());
      period_ = lap / spec_.speed;
      omega_ = kTwoPi / period_;
      break;
    }
    case ReferenceKind::kWaypoints: {
      if (spec_.waypoints.empty()) throw ConfigError("waypoint route needs at least one point");
      if (!(spec_.dwell >= 0.0)) throw ConfigError("waypoint dwell must be non-negative");
      double t = 0.0;
      for (std::size_t i = 0; i < spec_.waypoints.size(); ++i) {
        if (i > 0) t += (spec_.waypoints[i] - spec_.waypoints[i - 1]).norm() / spec_.speed;
        arrivals_.push_back(t);
        t += spec_.dwell;
      }
      period_ = t;
      break;
    }
  }
}

Vec2 ReferenceTrajectory::position(double t) const {
  if (!(t >= 0.0)) throw InvalidArgumentError("reference time must be non-negative");
  switch (spec_.kind) {
    case ReferenceKind::kSetpoint:
      return spec_.center;
    case ReferenceKind::kCircle:
      return spec_.center + spec_.radius * Vec2(std::cos(omega_ * t), std::sin(omega_ * t));
    case ReferenceKind::kEightFigure:
      return spec_.center + Vec2(spec_.extent.x() * std::sin(omega_ * t),
                                 spec_.extent.y() * std::sin(2.0 * omega_ * t));
    case ReferenceKind::kWaypoints: {
      const auto& w = spec_.waypoints;
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double leave = arrivals_[i] + spec_.dwell;
        if (t <= leave || i + 1 == w.size()) return w[i];
        if (t < arrivals_[i + 1]) {
          const double f = (t - leave) / (arrivals_[i + 1] - leave);
          return w[i] + f * (w[i + 1] - w[i]);
        }
      }
      return w.back();
    }
  }
  return spec_.center;
}

double ReferenceTrajectory::max_radius() const {
  switch (spec_.kind) {
    case ReferenceKind::kSetpoint:
      return spec_.center.norm();
    case ReferenceKind::kCircle:
      return spec_.center.norm() + spec_.radius;
    case ReferenceKind::kEightFigure: {
      double r = 0.0;
      constexpr int kSamples = 20000;
      for (int i = 0; i < kSamples; ++i) {
        const double s = kTwoPi * i / kSamples;
        r = std::max(r, (spec_.center + Vec2(spec_.extent.x() * std::sin(s),
                                             spec_.extent.y() * std::sin(2.0 * s)))
                            .norm());
      }
      return r;
    }
    case ReferenceKind::kWaypoints: {
      double r = 0.0;
      for (const Vec2& p : spec_.waypoints) r = std::max(r, p.norm());
      return r;
    }
  }
  return 0.0;
}

Vec2 make_reference(const ReferenceSpec& spec, double t) {
  return ReferenceTrajectory(spec).position(t);
}

void validate_reference(const ReferenceSpec& spec, double area_radius) {
  const ReferenceTrajectory trajectory(spec);
  const double r = trajectory.max_radius();
  if (r > area_radius + 1e-12) {
    throw ConfigError("reference reaches " + std::to_string(r * 1e3) +
                      " mm from the center, beyond the " + std::to_string(area_radius * 1e3) +
                      " mm manipulation area");
  }
}

}  // namespace phasepush
