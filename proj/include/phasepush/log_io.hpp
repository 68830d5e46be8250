#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "phasepush/field.hpp"
#include "phasepush/simulation.hpp"

namespace phasepush {

/// Shortest round-trip-safe text with 9 significant digits.
std::string format_number(double value);

/// Column header of the run log CSV.
extern const char* const kRunLogHeader;

void write_run_csv(const RunLog& log, std::ostream& out);
nlohmann::json summary_json(const RunSummary& summary);

/// Writes the per-period CSV and the JSON summary; IoError names the path.
void export_log(const RunLog& log, const std::string& csv_path, const std::string& summary_path);

/// Grid scan as CSV with header x,y,z,abs_p,re_p,im_p.
void write_grid_csv(const FieldGrid& grid, std::ostream& out);

}  // namespace phasepush
