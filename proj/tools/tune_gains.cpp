// Grid search over PID gains and process noise density; prints the
// worst-case closed-loop metrics over a set of seeds for each combination.

#include <algorithm>
#include <cstdio>
#include <vector>

#include <CLI11.hpp>

#include "phasepush/simulation.hpp"

using namespace phasepush;

namespace {

struct Metrics {
  double settle = 0.0;   ///< time after which the error stays below 2 mm [s]
  double hold = 0.0;     ///< max error after 5 s [m]
  double rms = 0.0;      ///< eight-figure RMS [m] (FB) or route RMS (BS)
  double waypoint = 0.0; ///< worst closest approach during dwell [m] (BS)
  double saturation = 0.0;
  bool failed = false;
};

Metrics evaluate_fb(LoopConfig config) {
  Metrics m;
  const RunLog log = run_loop(config);
  m.failed = log.status != RunStatus::kCompleted;
  for (const StepRecord& r : log.records) {
    const double e = (r.truth.position - r.reference).norm();
    if (e >= 2e-3) m.settle = r.time + config.dt;
    if (r.time >= 5.0) m.hold = std::max(m.hold, e);
  }
  config.reference.kind = ReferenceKind::kEightFigure;
  config.initial_state = BallState{};
  config.duration = 2.0 * ReferenceTrajectory(config.reference).period();
  const RunLog eight = run_loop(config);
  m.failed = m.failed || eight.status != RunStatus::kCompleted;
  const RunSummary s = summarize(eight);
  m.rms = s.rms_error;
  m.saturation = s.saturation_duty;
  return m;
}

Metrics evaluate_bs(const LoopConfig& config) {
  Metrics m;
  const RunLog log = run_loop(config);
  m.failed = log.status != RunStatus::kCompleted;
  const ReferenceTrajectory ref(config.reference);
  for (std::size_t i = 0; i < config.reference.waypoints.size(); ++i) {
    const double t0 = ref.arrival_time(i);
    double closest = 1.0;
    for (const StepRecord& r : log.records)
      if (r.time >= t0 && r.time <= t0 + config.reference.dwell)
        closest = std::min(closest, (r.truth.position - config.reference.waypoints[i]).norm());
    m.waypoint = std::max(m.waypoint, closest);
  }
  const RunSummary s = summarize(log);
  m.rms = s.rms_error;
  m.saturation = s.saturation_duty;
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PID gain grid search"};
  std::string scenario = "fb";
  std::vector<double> kp, ki, kd, q;
  int seeds = 5;
  app.add_option("--scenario", scenario)->check(CLI::IsMember({"fb", "bs"}));
  app.add_option("--kp", kp, "Proportional gains [N/m]");
  app.add_option("--ki", ki, "Integral gains [N/(m s)]");
  app.add_option("--kd", kd, "Derivative gains [N s/m]");
  app.add_option("--q", q, "Process noise densities [m^2/s^3]");
  app.add_option("--seeds", seeds, "Seeds 1..N per combination")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const LoopConfig base = LoopConfig::defaults(scenario_from_string(scenario));
  if (kp.empty()) kp = {base.pid.kp};
  if (ki.empty()) ki = {base.pid.ki};
  if (kd.empty()) kd = {base.pid.kd};
  if (q.empty()) q = {base.estimator.process_noise_density};

  for (double p : kp)
    for (double i : ki)
      for (double d : kd)
        for (double n : q) {
          Metrics worst;
          double saturation = 0.0;
          for (int seed = 1; seed <= seeds; ++seed) {
            LoopConfig c = base;
            c.pid.kp = p;
            c.pid.ki = i;
            c.pid.kd = d;
            c.estimator.process_noise_density = n;
            c.seed = static_cast<std::uint64_t>(seed);
            const Metrics m = base.scenario == Scenario::kFloating ? evaluate_fb(c) : evaluate_bs(c);
            worst.settle = std::max(worst.settle, m.settle);
            worst.hold = std::max(worst.hold, m.hold);
            worst.rms = std::max(worst.rms, m.rms);
            worst.waypoint = std::max(worst.waypoint, m.waypoint);
            worst.failed = worst.failed || m.failed;
            saturation += m.saturation / seeds;
          }
          std::printf("kp=%g ki=%g kd=%g q=%g  ", p, i, d, n);
          if (base.scenario == Scenario::kFloating)
            std::printf("settle %.2f s  hold %.2f mm  eight rms %.2f mm", worst.settle,
                        worst.hold * 1e3, worst.rms * 1e3);
          else
            std::printf("waypoint miss %.2f mm  rms %.2f mm", worst.waypoint * 1e3, worst.rms * 1e3);
          std::printf("  saturation %.2f%s\n", saturation, worst.failed ? "  FAILED" : "");
        }
  return 0;
}
