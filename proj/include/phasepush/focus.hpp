#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "phasepush/field.hpp"
#include "phasepush/geometry.hpp"
#include "phasepush/lbfgs.hpp"

namespace phasepush {

/// Desired pressure amplitude at a target point.
struct FocusSpec {
  Vec3 point = Vec3::Zero();  ///< x_press [m]
  double pressure = 0.0;      ///< P_des [Pa]
};

struct SolverSettings {
  int memory = 10;
  double gradient_tolerance = 1e-8;
  int max_iterations = 500;
  int restarts = 3;
  std::uint64_t seed = 0;
  /// Divide the cost by P_des^4. Ignored (treated as off) when P_des == 0.
  bool normalize = true;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  /// Restarts also stop once the (normalized) cost reaches this value.
  double cost_floor = 1e-20;
  /// A restart that stopped early (line search at machine precision) still
  /// counts as converged when its relative residual is below this.
  double residual_tolerance = 1e-6;
  /// Seed an alignment start when P_des exceeds this fraction of the bound.
  double alignment_start_fraction = 0.9;
  /// Extra random restarts drawn while no converged restart is a local
  /// maximum of |p| (checked with verify_local_max at `probe_radius`).
  int local_max_restarts = 24;
  double probe_radius = 1e-3;
};

struct SolveReport {
  PhaseVector phases;
  double cost = 0.0;
  double achieved_pressure = 0.0;  ///< |p| at the target [Pa]
  /// | |p|^2 - P_des^2 | / P_des^2, or |p|^2 in Pa^2 when P_des == 0.
  double relative_residual = 0.0;
  int iterations = 0;        ///< iterations of the selected restart
  int total_iterations = 0;  ///< summed over all restarts
  int restarts_used = 0;
  int best_restart = 0;
  double duration_seconds = 0.0;
  bool converged = false;
  bool local_max = false;
};

/// Sum_i |M_i(x)|: the largest |p| any phase vector can reach at x.
double alignment_bound(const ArrayGeometry& geometry, const Vec3& point);

/// phi_i = -arg M_i(x), which brings every contribution into phase at x.
PhaseVector alignment_phases(const ArrayGeometry& geometry, const Vec3& point);

/// Cost of a phase vector for a focus spec, as minimized by solve_focus.
double focus_cost(const QuadraticPressureForm& form, double target_pressure, bool normalize,
                  std::span<const double> phases, std::span<double> gradient);

/// Phase vector placing |p| = P_des at the target.
///
/// Each restart runs L-BFGS from its own start: the warm start (if given),
/// the alignment solution when P_des is close to the bound, then uniform
/// random phases until `settings.restarts` starts have been used. The cost
/// alone does not make the target a local maximum of |p|, so while no
/// converged restart passes verify_local_max, up to
/// `settings.local_max_restarts` further random starts are tried. Ranking:
/// converged first, then local maximum, then lowest cost, then lowest index.
SolveReport solve_focus(const ArrayGeometry& geometry, const FocusSpec& spec,
                        const SolverSettings& settings,
                        std::optional<std::span<const double>> warm_start = std::nullopt);

/// Simultaneous targets: minimizes the sum of per-point normalized costs.
struct MultiSolveReport {
  PhaseVector phases;
  double cost = 0.0;
  std::vector<double> achieved_pressures;
  int iterations = 0;
  bool converged = false;
};

MultiSolveReport solve_multi_focus(const ArrayGeometry& geometry, std::span<const FocusSpec> specs,
                                   const SolverSettings& settings);

/// True iff |p| at the target exceeds |p| at 8 equally spaced points on a
/// circle of `probe_radius` around it in the plane z = const.
bool verify_local_max(const ArrayGeometry& geometry, std::span<const double> phases,
                      const Vec3& point, double probe_radius = 1e-3);

/// Phase steps supported by the signal generator (one degree).
inline constexpr double kDegreeStep = kPi / 180.0;

/// Wraps each phase to [0, 2*pi) and rounds it to the nearest multiple of
/// `step`; exact half steps round up. A result landing on 2*pi wraps to 0.
PhaseVector quantize_phases(std::span<const double> phases, double step = kDegreeStep);
inline PhaseVector quantize_phases(const PhaseVector& phases, double step = kDegreeStep) {
  return quantize_phases(phases.values(), step);
}

}  // namespace phasepush
