#pragma once

#include <functional>
#include <span>
#include <vector>

namespace phasepush {

/// Cost function: returns f(x) and writes the gradient into the second argument.
using Objective = std::function<double(std::span<const double>, std::span<double>)>;

struct LbfgsSettings {
  int memory = 10;
  double gradient_tolerance = 1e-8;  ///< stop when ||g||_2 falls below
  double cost_floor = 0.0;           ///< stop when f falls to or below
  int max_iterations = 500;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search_evaluations = 40;
};

enum class LbfgsStatus { kGradientTolerance, kCostFloor, kMaxIterations, kLineSearchFailed };

const char* to_string(LbfgsStatus status);

struct LbfgsResult {
  std::vector<double> x;
  double cost = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  LbfgsStatus status = LbfgsStatus::kMaxIterations;
  /// Cost after every accepted iteration, starting with the initial cost.
  std::vector<double> cost_history;
};

/// Limited-memory BFGS with a strong Wolfe line search (bracketing + zoom
/// with safeguarded cubic interpolation).
LbfgsResult minimize_lbfgs(const Objective& objective, std::vector<double> x0,
                           const LbfgsSettings& settings);

}  // namespace phasepush
