#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "dcollapse/engine.hpp"
#include "dcollapse/scenario_config.hpp"

namespace dcollapse {

inline constexpr const char* kCsvHeader =
    "t_s,sigma_x_m,sigma_y_m,sigma_z_m,n_collisions,n_collapses,regime,last_event";

/// CSV: kCsvHeader then one row per record, reals in scientific notation with
/// 17 significant digits. JSON: an array of objects with the same field names.
/// Throws IoError if the sink fails; rows before the failure may have been
/// written.
void write_records(std::span<const TimeSeriesRecord> records, OutputFormat format,
                   std::ostream& sink);

/// Reads what write_records produced. Throws IoError on malformed input.
std::vector<TimeSeriesRecord> read_records(OutputFormat format, std::istream& source);

nlohmann::json to_json(const RunSummary& summary);
nlohmann::json to_json(const EnsembleSummary& summary);

}  // namespace dcollapse
