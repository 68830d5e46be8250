#include "phasepush/focus.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <string>

namespace phasepush {

double alignment_bound(const ArrayGeometry& geometry, const Vec3& point) {
  double bound = 0.0;
  for (std::size_t i = 0; i < geometry.size(); ++i) {
    bound += std::abs(transducer_pressure(geometry, i, point));
  }
  return bound;
}

PhaseVector alignment_phases(const ArrayGeometry& geometry, const Vec3& point) {
  std::vector<double> phases(geometry.size());
  for (std::size_t i = 0; i < geometry.size(); ++i) {
    phases[i] = -std::arg(transducer_pressure(geometry, i, point));
  }
  return PhaseVector(std::move(phases));
}

double focus_cost(const QuadraticPressureForm& form, double target_pressure, bool normalize,
                  std::span<const double> phases, std::span<double> gradient) {
  const double target_sq = target_pressure * target_pressure;
  const double scale = (normalize && target_pressure > 0.0) ? 1.0 / target_sq : 1.0;
  const double p_sq = pressure_sq_and_gradient(form, phases, gradient);
  const double r = (p_sq - target_sq) * scale;
  if (!gradient.empty()) {
    const double factor = 2.0 * r * scale;
    for (double& g : gradient) g *= factor;
  }
  return r * r;
}

namespace {

double relative_residual(double p_sq, double target) {
  const double target_sq = target * target;
  return target > 0.0 ? std::abs(p_sq - target_sq) / target_sq : p_sq;
}

LbfgsSettings lbfgs_settings(const SolverSettings& s) {
  LbfgsSettings out;
  out.memory = s.memory;
  out.gradient_tolerance = s.gradient_tolerance;
  out.max_iterations = s.max_iterations;
  out.wolfe_c1 = s.wolfe_c1;
  out.wolfe_c2 = s.wolfe_c2;
  out.cost_floor = s.cost_floor;
  return out;
}

void validate(const SolverSettings& s) {
  if (s.memory < 1) throw InvalidArgumentError("solver memory must be >= 1");
  if (!(s.gradient_tolerance > 0.0)) throw InvalidArgumentError("solver tolerance must be > 0");
  if (s.restarts < 1) throw InvalidArgumentError("solver restarts must be >= 1");
  if (s.max_iterations < 1) throw InvalidArgumentError("solver max_iterations must be >= 1");
}

// 53 random bits mapped onto [0, 2*pi); avoids implementation-defined
// distribution code so seeds reproduce across standard libraries.
std::vector<double> random_phases(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> out(n);
  for (double& p : out) p = static_cast<double>(rng() >> 11) * 0x1.0p-53 * kTwoPi;
  return out;
}

bool restart_converged(const LbfgsResult& r, double residual, const SolverSettings& s) {
  if (r.status == LbfgsStatus::kGradientTolerance || r.status == LbfgsStatus::kCostFloor) {
    return true;
  }
  return r.status == LbfgsStatus::kLineSearchFailed && residual <= s.residual_tolerance;
}

}  // namespace

SolveReport solve_focus(const ArrayGeometry& geometry, const FocusSpec& spec,
                        const SolverSettings& settings,
                        std::optional<std::span<const double>> warm_start) {
  const auto started = std::chrono::steady_clock::now();
  validate(settings);
  if (!(spec.pressure >= 0.0) || !std::isfinite(spec.pressure)) {
    throw InvalidArgumentError("desired pressure must be finite and non-negative");
  }
  const double bound = alignment_bound(geometry, spec.point);
  if (spec.pressure > bound * (1.0 + 1e-12)) {
    throw UnachievableTargetError("desired pressure " + std::to_string(spec.pressure) +
                                  " Pa exceeds the alignment bound " + std::to_string(bound) +
                                  " Pa at the target");
  }
  if (warm_start && warm_start->size() != geometry.size()) {
    throw DimensionError("warm start does not match geometry size");
  }

  const QuadraticPressureForm form = quadratic_form(geometry, spec.point);
  const bool normalize = settings.normalize && spec.pressure > 0.0;
  const Objective objective = [&](std::span<const double> x, std::span<double> g) {
    return focus_cost(form, spec.pressure, normalize, x, g);
  };

  std::vector<std::vector<double>> starts;
  if (warm_start) starts.emplace_back(warm_start->begin(), warm_start->end());
  if (spec.pressure > settings.alignment_start_fraction * bound) {
    starts.push_back(alignment_phases(geometry, spec.point).vector());
  }
  std::mt19937_64 rng(settings.seed);
  while (static_cast<int>(starts.size()) < settings.restarts) {
    starts.push_back(random_phases(rng, geometry.size()));
  }

  const LbfgsSettings lbfgs = lbfgs_settings(settings);
  SolveReport report;
  bool have_best = false;
  auto run_start = [&](std::vector<double> start) {
    const int index = report.restarts_used++;
    LbfgsResult r = minimize_lbfgs(objective, std::move(start), lbfgs);
    report.total_iterations += r.iterations;
    const double p_sq = pressure_sq_and_gradient(form, r.x, {});
    const double residual = relative_residual(p_sq, spec.pressure);
    const bool converged = restart_converged(r, residual, settings);
    const bool local_max =
        converged && verify_local_max(geometry, r.x, spec.point, settings.probe_radius);
    const auto rank = [](bool c, bool l) { return (c ? 2 : 0) + (l ? 1 : 0); };
    const int new_rank = rank(converged, local_max);
    const int old_rank = rank(report.converged, report.local_max);
    if (!have_best || new_rank > old_rank || (new_rank == old_rank && r.cost < report.cost)) {
      have_best = true;
      report.phases = PhaseVector(std::move(r.x));
      report.cost = r.cost;
      report.achieved_pressure = std::sqrt(p_sq);
      report.relative_residual = residual;
      report.iterations = r.iterations;
      report.best_restart = index;
      report.converged = converged;
      report.local_max = local_max;
    }
  };
  for (auto& start : starts) run_start(std::move(start));
  for (int extra = 0; extra < settings.local_max_restarts && !(report.converged && report.local_max);
       ++extra) {
    run_start(random_phases(rng, geometry.size()));
  }
  report.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (!report.converged) {
    throw NonConvergenceError("no restart converged; best relative residual " +
                              std::to_string(report.relative_residual));
  }
  return report;
}

MultiSolveReport solve_multi_focus(const ArrayGeometry& geometry, std::span<const FocusSpec> specs,
                                   const SolverSettings& settings) {
  validate(settings);
  if (specs.empty()) throw InvalidArgumentError("multi-focus needs at least one target");
  std::vector<QuadraticPressureForm> forms;
  forms.reserve(specs.size());
  for (const FocusSpec& spec : specs) {
    if (!(spec.pressure > 0.0)) {
      throw InvalidArgumentError("multi-focus targets need a positive pressure");
    }
    if (spec.pressure > alignment_bound(geometry, spec.point) * (1.0 + 1e-12)) {
      throw UnachievableTargetError("multi-focus target exceeds its alignment bound");
    }
    forms.push_back(quadratic_form(geometry, spec.point));
  }
  std::vector<double> scratch(geometry.size());
  const Objective objective = [&](std::span<const double> x, std::span<double> g) {
    double total = 0.0;
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t k = 0; k < forms.size(); ++k) {
      total += focus_cost(forms[k], specs[k].pressure, true, x, scratch);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += scratch[i];
    }
    return total;
  };

  std::mt19937_64 rng(settings.seed);
  const LbfgsSettings lbfgs = lbfgs_settings(settings);
  MultiSolveReport report;
  bool have_best = false;
  for (int k = 0; k < settings.restarts; ++k) {
    LbfgsResult r = minimize_lbfgs(objective, random_phases(rng, geometry.size()), lbfgs);
    if (!have_best || r.cost < report.cost) {
      have_best = true;
      report.cost = r.cost;
      report.iterations = r.iterations;
      report.converged = r.status != LbfgsStatus::kMaxIterations;
      report.phases = PhaseVector(std::move(r.x));
    }
  }
  for (const FocusSpec& spec : specs) {
    report.achieved_pressures.push_back(std::abs(field_pressure(geometry, report.phases, spec.point)));
  }
  return report;
}

bool verify_local_max(const ArrayGeometry& geometry, std::span<const double> phases,
                      const Vec3& point, double probe_radius) {
  if (!(probe_radius > 0.0)) throw InvalidArgumentError("probe radius must be positive");
  const double center = std::abs(field_pressure(geometry, phases, point));
  for (int k = 0; k < 8; ++k) {
    const double angle = k * kPi / 4.0;
    const Vec3 probe = point + probe_radius * Vec3(std::cos(angle), std::sin(angle), 0.0);
    if (!(center > std::abs(field_pressure(geometry, phases, probe)))) return false;
  }
  return true;
}

PhaseVector quantize_phases(std::span<const double> phases, double step) {
  if (!(step > 0.0)) throw InvalidArgumentError("quantization step must be positive");
  std::vector<double> out(phases.size());
  for (std::size_t i = 0; i < phases.size(); ++i) {
    double q = std::floor(wrap_phase(phases[i]) / step + 0.5) * step;
    if (q >= kTwoPi) q -= kTwoPi;
    out[i] = q;
  }
  return PhaseVector(std::move(out));
}

}  // namespace phasepush
