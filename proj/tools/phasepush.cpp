// phasepush command line: field scans, single focus solves, closed-loop runs.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phasepush/config.hpp"
#include "phasepush/field.hpp"
#include "phasepush/focus.hpp"
#include "phasepush/log_io.hpp"
#include "phasepush/simulation.hpp"

using namespace phasepush;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kRunFailure = 2, kIoError = 3 };

// Output stream bound to a path, or stdout for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw IoError("cannot open '" + path + "' for writing");
    path_ = path;
  }
  std::ostream& stream() { return path_.empty() ? std::cout : file_; }
  void close() {
    stream().flush();
    if (!stream()) throw IoError("failed writing '" + (path_.empty() ? "stdout" : path_) + "'");
  }

 private:
  std::ofstream file_;
  std::string path_;
};

ArrayGeometry load_geometry(const std::string& config_path) {
  if (config_path.empty()) return GeometryConfig{}.build();
  return load_loop_config(config_path).geometry.build();
}

std::vector<double> load_phases(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
  if (doc.is_object() && doc.contains("phases_rad")) doc = doc["phases_rad"];
  if (!doc.is_array() || doc.size() != n) {
    throw ConfigError("'" + path + "': expected an array of " + std::to_string(n) + " phases");
  }
  std::vector<double> out;
  for (const auto& v : doc) {
    if (!v.is_number()) throw ConfigError("'" + path + "': phases must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

GridAxis make_axis(const std::vector<double>& range, const char* name) {
  // min max count
  if (range.size() != 3) throw ConfigError(std::string("--") + name + " takes MIN MAX COUNT");
  const double count = range[2];
  if (count < 1 || count != std::floor(count)) {
    throw ConfigError(std::string("--") + name + ": COUNT must be a positive integer");
  }
  const auto n = static_cast<std::size_t>(count);
  if (n > 1 && !(range[1] > range[0])) throw ConfigError(std::string("--") + name + ": MAX must exceed MIN");
  return {range[0], n > 1 ? (range[1] - range[0]) / static_cast<double>(n - 1) : 0.0, n};
}

json phases_json(const PhaseVector& phases, double step) {
  const PhaseVector q = quantize_phases(phases, step);
  json rad = json::array();
  json steps = json::array();
  for (std::size_t i = 0; i < phases.size(); ++i) {
    rad.push_back(phases[i]);
    steps.push_back(static_cast<long>(std::lround(q[i] / step)));
  }
  return {{"phases_rad", rad}, {"phases_steps", steps}};
}

// --- subcommands -----------------------------------------------------------

struct FieldScanArgs {
  std::vector<double> x{0.0, 0.0, 1.0};
  std::vector<double> y{-0.03, 0.03, 61.0};
  std::vector<double> z{0.02, 0.1, 81.0};
  std::string phases_path;
  std::vector<double> focus;
  double pressure = 2500.0;
  std::string config_path;
  std::string out;
  unsigned threads = 0;
};

int field_scan(const FieldScanArgs& a) {
  const ArrayGeometry geometry = load_geometry(a.config_path);
  std::vector<double> phases(geometry.size(), 0.0);
  if (!a.phases_path.empty()) {
    phases = load_phases(a.phases_path, geometry.size());
  } else if (!a.focus.empty()) {
    SolverSettings settings;
    const SolveReport r = solve_focus(geometry, {1e-3 * Vec3(a.focus[0], a.focus[1], a.focus[2]), a.pressure}, settings);
    const PhaseVector q = quantize_phases(r.phases);
    phases.assign(q.values().begin(), q.values().end());
  }
  const GridSpec grid{make_axis(a.x, "x"), make_axis(a.y, "y"), make_axis(a.z, "z")};
  const FieldGrid result = field_grid(geometry, phases, grid, a.threads);
  Output out(a.out);
  write_grid_csv(result, out.stream());
  out.close();
  return kOk;
}

struct FocusArgs {
  std::vector<double> point{0.0, 0.0, 65.0};  // [mm]
  double pressure = 2500.0;
  std::uint64_t seed = 0;
  int restarts = 3;
  bool no_normalize = false;
  double step_deg = 1.0;
  std::string config_path;
  std::string out;
};

int focus(const FocusArgs& a) {
  if (!(a.step_deg > 0.0)) throw ConfigError("--step-deg must be positive");
  const ArrayGeometry geometry = load_geometry(a.config_path);
  SolverSettings settings;
  settings.seed = a.seed;
  settings.restarts = a.restarts;
  settings.normalize = !a.no_normalize;
  const Vec3 point = 1e-3 * Vec3(a.point[0], a.point[1], a.point[2]);
  const SolveReport r = solve_focus(geometry, {point, a.pressure}, settings);
  const double step = a.step_deg * kPi / 180.0;
  const PhaseVector q = quantize_phases(r.phases, step);
  json doc = phases_json(r.phases, step);
  doc["point_mm"] = a.point;
  doc["target_pressure"] = a.pressure;
  doc["step_deg"] = a.step_deg;
  doc["achieved_pressure"] = r.achieved_pressure;
  doc["achieved_pressure_quantized"] = std::abs(field_pressure(geometry, q, point));
  doc["alignment_bound"] = alignment_bound(geometry, point);
  doc["relative_residual"] = r.relative_residual;
  doc["iterations"] = r.iterations;
  doc["total_iterations"] = r.total_iterations;
  doc["restarts_used"] = r.restarts_used;
  doc["converged"] = r.converged;
  doc["local_max"] = r.local_max;
  doc["duration_seconds"] = r.duration_seconds;
  Output out(a.out);
  out.stream() << doc.dump(2) << '\n';
  out.close();
  return kOk;
}

struct SimulateArgs {
  std::string config_path;
  std::string scenario = "fb";
  std::string csv = "run.csv";
  std::string summary = "summary.json";
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  double max_failure_fraction = 0.05;
};

int simulate(const SimulateArgs& a) {
  LoopConfig config = a.config_path.empty() ? LoopConfig::defaults(scenario_from_string(a.scenario))
                                            : load_loop_config(a.config_path);
  if (a.seed) config.seed = *a.seed;
  if (a.duration) config.duration = *a.duration;
  config.validate();
  const RunLog log = run_loop(config);
  export_log(log, a.csv, a.summary);
  const RunSummary s = summarize(log);
  std::fprintf(stderr, "%zu steps, status %s, rms error %.3f mm, max error %.3f mm\n", s.steps,
               to_string(s.status), s.rms_error * 1e3, s.max_error * 1e3);
  if (log.status != RunStatus::kCompleted) {
    std::fprintf(stderr, "run failed: %s\n", log.failure.c_str());
    return kRunFailure;
  }
  if (s.steps > 0 &&
      static_cast<double>(s.solver_failures) > a.max_failure_fraction * static_cast<double>(s.steps)) {
    std::fprintf(stderr, "%d solver failures in %zu steps\n", s.solver_failures, s.steps);
    return kRunFailure;
  }
  return kOk;
}

struct GradcheckArgs {
  int instances = 100;
  std::uint64_t seed = 1;
  double step = 1e-6;
  double tolerance = 1e-6;
  std::string config_path;
};

int gradcheck(const GradcheckArgs& a) {
  if (a.instances < 1 || !(a.step > 0.0)) throw ConfigError("need instances >= 1 and step > 0");
  const ArrayGeometry geometry = load_geometry(a.config_path);
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::uniform_real_distribution<double> lateral(-0.03, 0.03);
  std::uniform_real_distribution<double> height(0.03, 0.1);
  double worst = 0.0;
  std::vector<double> grad(geometry.size());
  for (int t = 0; t < a.instances; ++t) {
    const Vec3 x(lateral(rng), lateral(rng), height(rng));
    std::vector<double> phi(geometry.size());
    for (double& p : phi) p = phase(rng);
    const QuadraticPressureForm form = quadratic_form(geometry, x);
    pressure_sq_and_gradient(form, phi, grad);
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const double keep = phi[i];
      phi[i] = keep + a.step;
      const double up = std::norm(field_pressure(geometry, phi, x));
      phi[i] = keep - a.step;
      const double down = std::norm(field_pressure(geometry, phi, x));
      phi[i] = keep;
      const double fd = (up - down) / (2 * a.step);
      diff += (grad[i] - fd) * (grad[i] - fd);
      norm += fd * fd;
    }
    worst = std::max(worst, std::sqrt(diff / norm));
  }
  const bool pass = worst < a.tolerance;
  std::cout << json{{"instances", a.instances},
                    {"step", a.step},
                    {"worst_relative_error", worst},
                    {"tolerance", a.tolerance},
                    {"pass", pass}}
                   .dump(2)
            << '\n';
  return pass ? kOk : kRunFailure;
}

int default_config(const std::string& scenario, const std::string& path) {
  Output out(path);
  out.stream() << to_json(LoopConfig::defaults(scenario_from_string(scenario))).dump(2) << '\n';
  out.close();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phased-array acoustic manipulation simulator"};
  app.require_subcommand(1);

  FieldScanArgs scan;
  auto* scan_cmd = app.add_subcommand("field-scan", "Evaluate |p| on a grid and write CSV");
  scan_cmd->add_option("--x", scan.x, "MIN MAX COUNT [m]")->expected(3);
  scan_cmd->add_option("--y", scan.y, "MIN MAX COUNT [m]")->expected(3);
  scan_cmd->add_option("--z", scan.z, "MIN MAX COUNT [m]")->expected(3);
  auto* phases_opt = scan_cmd->add_option("--phases", scan.phases_path,
                                          "JSON array of phases [rad] (or focus output)");
  scan_cmd->add_option("--focus", scan.focus, "Solve a focus at X Y Z [mm] first")
      ->expected(3)
      ->excludes(phases_opt);
  scan_cmd->add_option("--pressure", scan.pressure, "Focus target [Pa]");
  scan_cmd->add_option("--config", scan.config_path, "Take the array geometry from a config");
  scan_cmd->add_option("-o,--out", scan.out, "CSV path (default stdout)");
  scan_cmd->add_option("--threads", scan.threads, "Worker threads (0: hardware)");

  FocusArgs foc;
  auto* focus_cmd = app.add_subcommand("focus", "Solve phases for one focal point");
  focus_cmd->add_option("--point", foc.point, "X Y Z [mm]")->expected(3);
  focus_cmd->add_option("--pressure", foc.pressure, "Target |p| [Pa]");
  focus_cmd->add_option("--seed", foc.seed);
  focus_cmd->add_option("--restarts", foc.restarts)->check(CLI::PositiveNumber);
  focus_cmd->add_flag("--no-normalize", foc.no_normalize, "Use the unnormalized cost");
  focus_cmd->add_option("--step-deg", foc.step_deg, "Phase quantization step [deg]");
  focus_cmd->add_option("--config", foc.config_path, "Take the array geometry from a config");
  focus_cmd->add_option("-o,--out", foc.out, "JSON path (default stdout)");

  SimulateArgs sim;
  std::uint64_t sim_seed = 0;
  double sim_duration = 0.0;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the closed loop and write CSV + JSON summary");
  sim_cmd->add_option("-c,--config", sim.config_path, "Loop config JSON");
  sim_cmd->add_option("--scenario", sim.scenario, "Defaults to use without --config")
      ->check(CLI::IsMember({"fb", "bs"}));
  sim_cmd->add_option("--csv", sim.csv, "Per-period log");
  sim_cmd->add_option("--summary", sim.summary, "Summary JSON");
  auto* seed_opt = sim_cmd->add_option("--seed", sim_seed, "Override the config seed");
  auto* dur_opt = sim_cmd->add_option("--duration", sim_duration, "Override the duration [s]");
  sim_cmd->add_option("--max-solver-failures", sim.max_failure_fraction,
                      "Fraction of failed solves tolerated before exit 2");

  GradcheckArgs gc;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Analytic vs central-difference gradient");
  gc_cmd->add_option("--instances", gc.instances);
  gc_cmd->add_option("--seed", gc.seed);
  gc_cmd->add_option("--step", gc.step, "Difference step [rad]");
  gc_cmd->add_option("--tolerance", gc.tolerance, "Relative error bound");
  gc_cmd->add_option("--config", gc.config_path, "Take the array geometry from a config");

  std::string scenario = "fb";
  std::string config_out;
  auto* dc_cmd = app.add_subcommand("default-config", "Print the default loop config");
  dc_cmd->add_option("--scenario", scenario)->check(CLI::IsMember({"fb", "bs"}));
  dc_cmd->add_option("-o,--out", config_out, "JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*scan_cmd) return field_scan(scan);
    if (*focus_cmd) return focus(foc);
    if (*sim_cmd) {
      if (*seed_opt) sim.seed = sim_seed;
      if (*dur_opt) sim.duration = sim_duration;
      return simulate(sim);
    }
    if (*gc_cmd) return gradcheck(gc);
    if (*dc_cmd) return default_config(scenario, config_out);
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kIoError;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const InvalidArgumentError& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kConfigError;
  } catch (const UnachievableTargetError& e) {
    std::fprintf(stderr, "unachievable target: %s\n", e.what());
    return kConfigError;
  } catch (const DegeneratePointError& e) {
    std::fprintf(stderr, "invalid point: %s\n", e.what());
    return kConfigError;
  } catch (const Error& e) {
    std::fprintf(stderr, "run failed: %s\n", e.what());
    return kRunFailure;
  }
  return kOk;
}
