#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcollapse/engine.hpp"
#include "dcollapse/scenario_config.hpp"

namespace dcollapse {

/// MASS sets the object mass, DIAMETER the object diameter (twice the
/// internal radius), RATE the collision rate.
enum class SweepAxis { Mass, Diameter, Rate };

SweepAxis parse_sweep_axis(std::string_view text);
const char* to_string(SweepAxis axis);

struct SweepRow {
  double value = 0.0;
  std::optional<EnsembleSummary> ensemble;
  std::string error;  // set when this value could not be run

  double mean_recovery_ratio() const;
  double localization_fraction() const;
};

/// Mass grid spanning the molecule-to-grain range, ascending.
std::vector<double> default_mass_grid();

ScenarioConfig with_axis_value(const ScenarioConfig& base, SweepAxis axis, double value);

/// One ensemble (seeds base.seed + i) per value; rows sorted by value. A value
/// that fails is reported in its row and the sweep continues. Throws
/// DomainError for an empty value list or non-positive values.
std::vector<SweepRow> sweep(const ScenarioConfig& base, SweepAxis axis,
                            std::span<const double> values, std::size_t n_replicas,
                            std::size_t threads = 0);

/// CSV table: value,mean_recovery_ratio,localization_fraction,firing_fraction,
/// mean_final_sigma_m,n_failed,error
void write_sweep_table(std::span<const SweepRow> rows, SweepAxis axis, std::ostream& sink);

}  // namespace dcollapse
