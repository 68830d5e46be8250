#include "phasepush/log_io.hpp"

#include <charconv>
#include <fstream>

namespace phasepush {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

const char* const kRunLogHeader =
    "t,ref_x,ref_y,x,y,vx,vy,meas_x,meas_y,est_x,est_y,est_vx,est_vy,force_x,force_y,"
    "press_x,press_y,p_des,p_target,p_abs,solver_iterations,solver_ok,saturated,status";

void write_run_csv(const RunLog& log, std::ostream& out) {
  out << kRunLogHeader << '\n';
  for (const StepRecord& r : log.records) {
    const double values[] = {r.time,
                             r.reference.x(),
                             r.reference.y(),
                             r.truth.position.x(),
                             r.truth.position.y(),
                             r.truth.velocity.x(),
                             r.truth.velocity.y(),
                             r.measured.x(),
                             r.measured.y(),
                             r.estimated_position.x(),
                             r.estimated_position.y(),
                             r.estimated_velocity.x(),
                             r.estimated_velocity.y(),
                             r.force.x(),
                             r.force.y(),
                             r.pressure_point.x(),
                             r.pressure_point.y(),
                             r.commanded_pressure,
                             r.target_pressure,
                             r.achieved_pressure};
    for (double v : values) out << format_number(v) << ',';
    out << r.solver_iterations << ',' << (r.solver_ok ? 1 : 0) << ',' << (r.saturated ? 1 : 0)
        << ',' << (r.out_of_area ? "out_of_area" : "ok") << '\n';
  }
}

nlohmann::json summary_json(const RunSummary& s) {
  return {{"steps", s.steps},
          {"rms_error", s.rms_error},
          {"max_error", s.max_error},
          {"solver_p50_ms", s.solver_p50_seconds * 1e3},
          {"solver_p95_ms", s.solver_p95_seconds * 1e3},
          {"saturation_duty", s.saturation_duty},
          {"solver_failures", s.solver_failures},
          {"status", to_string(s.status)},
          {"failure", s.failure}};
}

void export_log(const RunLog& log, const std::string& csv_path, const std::string& summary_path) {
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw IoError("cannot open '" + csv_path + "' for writing");
    write_run_csv(log, csv);
    if (!csv.flush()) throw IoError("failed writing '" + csv_path + "'");
  }
  std::ofstream summary(summary_path, std::ios::binary);
  if (!summary) throw IoError("cannot open '" + summary_path + "' for writing");
  summary << summary_json(summarize(log)).dump(2) << '\n';
  if (!summary.flush()) throw IoError("failed writing '" + summary_path + "'");
}

void write_grid_csv(const FieldGrid& grid, std::ostream& out) {
  out << "x,y,z,abs_p,re_p,im_p\n";
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const Vec3 p = grid.point(i);
    const ComplexPressure v = grid.values[i];
    out << format_number(p.x()) << ',' << format_number(p.y()) << ',' << format_number(p.z())
        << ',' << format_number(std::abs(v)) << ',' << format_number(v.real()) << ','
        << format_number(v.imag()) << '\n';
  }
}

}  // namespace phasepush
