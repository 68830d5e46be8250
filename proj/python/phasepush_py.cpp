#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phasepush/config.hpp"
#include "phasepush/field.hpp"
#include "phasepush/focus.hpp"
#include "phasepush/log_io.hpp"
#include "phasepush/simulation.hpp"

namespace py = pybind11;
using namespace phasepush;

namespace {

using Phases = std::vector<double>;

Phases to_vector(const PhaseVector& p) { return {p.values().begin(), p.values().end()}; }

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["phases"] = to_vector(r.phases);
  d["cost"] = r.cost;
  d["achieved_pressure"] = r.achieved_pressure;
  d["relative_residual"] = r.relative_residual;
  d["iterations"] = r.iterations;
  d["total_iterations"] = r.total_iterations;
  d["restarts_used"] = r.restarts_used;
  d["converged"] = r.converged;
  d["local_max"] = r.local_max;
  d["duration_seconds"] = r.duration_seconds;
  return d;
}

py::dict summary_dict(const RunSummary& s) {
  return py::module_::import("json").attr("loads")(summary_json(s).dump());
}

py::array_t<double> column(const RunLog& log, auto get) {
  py::array_t<double> out(static_cast<py::ssize_t>(log.records.size()));
  auto view = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < log.records.size(); ++i) view(static_cast<py::ssize_t>(i)) = get(log.records[i]);
  return out;
}

py::array_t<double> pairs(const RunLog& log, auto get) {
  py::array_t<double> out({static_cast<py::ssize_t>(log.records.size()), py::ssize_t{2}});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const Vec2 v = get(log.records[i]);
    view(static_cast<py::ssize_t>(i), 0) = v.x();
    view(static_cast<py::ssize_t>(i), 1) = v.y();
  }
  return out;
}

LoopConfig parse_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what());
  }
  return loop_config_from_json(doc);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Phased-array acoustic field, phase solver and closed-loop simulator";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<UnachievableTargetError>(m, "UnachievableTargetError", base.ptr());
  py::register_exception<NonConvergenceError>(m, "NonConvergenceError", base.ptr());
  py::register_exception<DegeneratePointError>(m, "DegeneratePointError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<InvalidArgumentError>(m, "InvalidArgumentError", base.ptr());

  m.attr("DEGREE_STEP") = kDegreeStep;

  py::class_<ArrayGeometry>(m, "ArrayGeometry")
      .def_static(
          "planar_grid",
          [](int rows, int cols, double pitch) { return ArrayGeometry::planar_grid(rows, cols, pitch); },
          py::arg("rows") = 8, py::arg("cols") = 8, py::arg("pitch") = 0.0105)
      .def("__len__", &ArrayGeometry::size)
      .def_property_readonly("wavenumber", &ArrayGeometry::wavenumber)
      .def_property_readonly("radius", &ArrayGeometry::radius)
      .def_property_readonly("power", &ArrayGeometry::power)
      .def("position", &ArrayGeometry::position, py::arg("i"));

  m.def("field_pressure",
        [](const ArrayGeometry& g, const Phases& phases, const Vec3& point) {
          return field_pressure(g, phases, point);
        },
        py::arg("geometry"), py::arg("phases"), py::arg("point"));

  m.def("field_scan",
        [](const ArrayGeometry& g, const Phases& phases, std::tuple<double, double, std::size_t> x,
           std::tuple<double, double, std::size_t> y, std::tuple<double, double, std::size_t> z) {
          auto axis = [](const auto& t) {
            return GridAxis{std::get<0>(t), std::get<1>(t), std::get<2>(t)};
          };
          const GridSpec spec{axis(x), axis(y), axis(z)};
          FieldGrid grid;
          {
            py::gil_scoped_release release;
            grid = field_grid(g, phases, spec);
          }
          py::array_t<std::complex<double>> out({static_cast<py::ssize_t>(spec.z.count),
                                                 static_cast<py::ssize_t>(spec.y.count),
                                                 static_cast<py::ssize_t>(spec.x.count)});
          std::copy(grid.values.begin(), grid.values.end(), out.mutable_data());
          return out;
        },
        py::arg("geometry"), py::arg("phases"), py::arg("x"), py::arg("y"), py::arg("z"),
        "Complex pressure on a grid; each axis is (start, step, count). Shape (nz, ny, nx).");

  m.def("pressure_sq_and_gradient",
        [](const ArrayGeometry& g, const Phases& phases, const Vec3& point) {
          const PressureSqGradient r = pressure_sq_and_gradient(quadratic_form(g, point), phases);
          return py::make_tuple(r.value, r.gradient);
        },
        py::arg("geometry"), py::arg("phases"), py::arg("point"));

  m.def("alignment_bound", &alignment_bound, py::arg("geometry"), py::arg("point"));
  m.def("alignment_phases",
        [](const ArrayGeometry& g, const Vec3& point) { return to_vector(alignment_phases(g, point)); },
        py::arg("geometry"), py::arg("point"));

  m.def("solve_focus",
        [](const ArrayGeometry& g, const Vec3& point, double pressure, std::uint64_t seed, int restarts,
           bool normalize, std::optional<Phases> warm_start) {
          SolverSettings settings;
          settings.seed = seed;
          settings.restarts = restarts;
          settings.normalize = normalize;
          SolveReport r;
          {
            py::gil_scoped_release release;
            r = warm_start ? solve_focus(g, {point, pressure}, settings, std::span<const double>(*warm_start))
                           : solve_focus(g, {point, pressure}, settings);
          }
          return report_dict(r);
        },
        py::arg("geometry"), py::arg("point"), py::arg("pressure"), py::arg("seed") = 0,
        py::arg("restarts") = 3, py::arg("normalize") = true, py::arg("warm_start") = py::none());

  m.def("verify_local_max",
        [](const ArrayGeometry& g, const Phases& phases, const Vec3& point, double radius) {
          return verify_local_max(g, phases, point, radius);
        },
        py::arg("geometry"), py::arg("phases"), py::arg("point"), py::arg("probe_radius") = 1e-3);

  m.def("quantize_phases",
        [](const Phases& phases, double step) { return to_vector(quantize_phases(phases, step)); },
        py::arg("phases"), py::arg("step") = kDegreeStep);

  m.def("default_config_json",
        [](const std::string& scenario) {
          return to_json(LoopConfig::defaults(scenario_from_string(scenario))).dump();
        },
        py::arg("scenario") = "fb");

  m.def("run_loop_json",
        [](const std::string& config_text) {
          const LoopConfig config = parse_config(config_text);
          RunLog log;
          {
            py::gil_scoped_release release;
            log = run_loop(config);
          }
          py::dict d;
          d["time"] = column(log, [](const StepRecord& r) { return r.time; });
          d["reference"] = pairs(log, [](const StepRecord& r) { return r.reference; });
          d["position"] = pairs(log, [](const StepRecord& r) { return r.truth.position; });
          d["velocity"] = pairs(log, [](const StepRecord& r) { return r.truth.velocity; });
          d["measured"] = pairs(log, [](const StepRecord& r) { return r.measured; });
          d["estimate"] = pairs(log, [](const StepRecord& r) { return r.estimated_position; });
          d["force"] = pairs(log, [](const StepRecord& r) { return r.force; });
          d["pressure_point"] = pairs(log, [](const StepRecord& r) { return r.pressure_point; });
          d["commanded_pressure"] = column(log, [](const StepRecord& r) { return r.commanded_pressure; });
          d["achieved_pressure"] = column(log, [](const StepRecord& r) { return r.achieved_pressure; });
          d["summary"] = summary_dict(summarize(log));
          return d;
        },
        py::arg("config_json"));

  m.def("simulate_to_files",
        [](const std::string& config_text, const std::string& csv_path, const std::string& summary_path) {
          const LoopConfig config = parse_config(config_text);
          RunLog log;
          {
            py::gil_scoped_release release;
            log = run_loop(config);
            export_log(log, csv_path, summary_path);
          }
          return summary_dict(summarize(log));
        },
        py::arg("config_json"), py::arg("csv_path"), py::arg("summary_path"));
}
