#include "phasepush/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "phasepush/common.hpp"

namespace phasepush {

const char* to_string(LbfgsStatus status) {
  switch (status) {
    case LbfgsStatus::kGradientTolerance: return "gradient_tolerance";
    case LbfgsStatus::kCostFloor: return "cost_floor";
    case LbfgsStatus::kMaxIterations: return "max_iterations";
    case LbfgsStatus::kLineSearchFailed: return "line_search_failed";
  }
  return "unknown";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Minimizer of the cubic through (a, fa, da) and (b, fb, db), clamped into
/// the inner 80% of the interval; falls back to bisection.
double interpolate(double a, double fa, double da, double b, double fb, double db) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  const double margin = 0.1 * (hi - lo);
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  double t = 0.5 * (a + b);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double denom = db - da + 2.0 * d2;
    if (denom != 0.0) {
      const double cand = b - (b - a) * (db + d2 - d1) / denom;
      if (std::isfinite(cand)) t = cand;
    }
  }
  return std::clamp(t, lo + margin, hi - margin);
}

struct LineSearch {
  const Objective& objective;
  const LbfgsSettings& settings;
  std::span<const double> x;
  std::span<const double> direction;
  double f0;
  double slope0;
  std::vector<double> trial;
  std::vector<double> trial_grad;
  int evaluations = 0;
  double last_f = 0.0;  // cost at `trial`

  struct Sample {
    double alpha;
    double f;
    double slope;
  };

  Sample evaluate(double alpha) {
    for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + alpha * direction[i];
    const double f = objective(trial, trial_grad);
    ++evaluations;
    last_f = f;
    return {alpha, f, dot(trial_grad, direction)};
  }

  bool armijo_fails(const Sample& s) const {
    return !std::isfinite(s.f) || s.f > f0 + settings.wolfe_c1 * s.alpha * slope0;
  }
  bool curvature_holds(const Sample& s) const {
    return std::abs(s.slope) <= -settings.wolfe_c2 * slope0;
  }

  bool zoom(Sample lo, Sample hi) {
    while (evaluations < settings.max_line_search_evaluations) {
      if (std::abs(hi.alpha - lo.alpha) <= 1e-16 * std::max(1.0, lo.alpha)) return false;
      const double alpha = interpolate(lo.alpha, lo.f, lo.slope, hi.alpha, hi.f, hi.slope);
      const Sample s = evaluate(alpha);
      if (armijo_fails(s) || s.f >= lo.f) {
        hi = s;
      } else {
        if (curvature_holds(s)) return true;
        if (s.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = s;
      }
    }
    return false;
  }

  /// On success `trial`/`trial_grad` hold the accepted point.
  bool run(double alpha_init) {
    Sample prev{0.0, f0, slope0};
    double alpha = alpha_init;
    for (int i = 0; evaluations < settings.max_line_search_evaluations; ++i) {
      const Sample s = evaluate(alpha);
      if (armijo_fails(s) || (i > 0 && s.f >= prev.f)) {
        return zoom(prev, s) || finish(prev);
      }
      if (curvature_holds(s)) return true;
      if (s.slope >= 0.0) return zoom(s, prev) || finish(prev);
      prev = s;
      alpha *= 2.0;
    }
    return false;
  }

  // zoom ran out of budget: fall back to the best sufficient-decrease point
  // seen, if any, so progress is never discarded.
  bool finish(const Sample& best) {
    if (best.alpha <= 0.0 || armijo_fails(best)) return false;
    evaluate(best.alpha);
    return true;
  }
};

}  // namespace

LbfgsResult minimize_lbfgs(const Objective& objective, std::vector<double> x0,
                           const LbfgsSettings& settings) {
  if (settings.memory < 1) throw InvalidArgumentError("L-BFGS memory must be >= 1");
  if (!(settings.gradient_tolerance > 0.0)) {
    throw InvalidArgumentError("L-BFGS gradient tolerance must be positive");
  }
  const std::size_t n = x0.size();
  LbfgsResult result;
  result.x = std::move(x0);
  std::vector<double> grad(n);
  result.cost = objective(result.x, grad);
  result.evaluations = 1;
  result.cost_history.push_back(result.cost);
  if (!std::isfinite(result.cost)) {
    result.status = LbfgsStatus::kLineSearchFailed;
    return result;
  }

  std::deque<std::vector<double>> s_hist;
  std::deque<std::vector<double>> y_hist;
  std::deque<double> rho_hist;
  std::vector<double> direction(n);
  std::vector<double> alpha_buf(static_cast<std::size_t>(settings.memory));
  bool reset_once = false;

  while (true) {
    result.gradient_norm = norm(grad);
    if (result.gradient_norm <= settings.gradient_tolerance) {
      result.status = LbfgsStatus::kGradientTolerance;
      return result;
    }
    if (result.cost <= settings.cost_floor) {
      result.status = LbfgsStatus::kCostFloor;
      return result;
    }
    if (result.iterations >= settings.max_iterations) {
      result.status = LbfgsStatus::kMaxIterations;
      return result;
    }

    // two-loop recursion: direction = -H g
    for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
    const std::size_t m = s_hist.size();
    for (std::size_t j = m; j-- > 0;) {
      alpha_buf[j] = rho_hist[j] * dot(s_hist[j], direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] -= alpha_buf[j] * y_hist[j][i];
    }
    if (m > 0) {
      const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& d : direction) d *= gamma;
    }
    for (std::size_t j = 0; j < m; ++j) {
      const double beta = rho_hist[j] * dot(y_hist[j], direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] += (alpha_buf[j] - beta) * s_hist[j][i];
    }
    double slope = dot(grad, direction);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
      slope = -result.gradient_norm * result.gradient_norm;
    }
    const double alpha_init = s_hist.empty() ? std::min(1.0, 1.0 / result.gradient_norm) : 1.0;

    LineSearch search{objective, settings, result.x, direction, result.cost, slope,
                      std::vector<double>(n), std::vector<double>(n)};
    const bool ok = search.run(alpha_init);
    result.evaluations += search.evaluations;
    if (!ok) {
      if (s_hist.empty() || reset_once) {
        result.status = LbfgsStatus::kLineSearchFailed;
        return result;
      }
      // retry once along steepest descent with a fresh memory
      reset_once = true;
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      continue;
    }
    reset_once = false;

    std::vector<double> s(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = search.trial[i] - result.x[i];
      y[i] = search.trial_grad[i] - grad[i];
    }
    const double sy = dot(s, y);
    result.x.swap(search.trial);
    grad.swap(search.trial_grad);
    result.cost = search.last_f;
    ++result.iterations;
    result.cost_history.push_back(result.cost);

    if (sy > std::numeric_limits<double>::epsilon() * dot(y, y)) {
      if (static_cast<int>(s_hist.size()) == settings.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
  }
}

}  // namespace phasepush
