#include "dcollapse/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "dcollapse/errors.hpp"

namespace dcollapse {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

}  // namespace

SweepAxis parse_sweep_axis(std::string_view text) {
  if (text == "mass" || text == "MASS") return SweepAxis::Mass;
  if (text == "diameter" || text == "DIAMETER") return SweepAxis::Diameter;
  if (text == "rate" || text == "RATE") return SweepAxis::Rate;
  throw ConfigError({"sweep axis must be one of mass, diameter, rate; got \"" +
                     std::string(text) + "\""});
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Mass: return "mass_kg";
    case SweepAxis::Diameter: return "diameter_m";
    case SweepAxis::Rate: return "collision_rate_hz";
  }
  return "value";
}

double SweepRow::mean_recovery_ratio() const {
  return ensemble ? ensemble->mean_recovery_ratio : kNaN;
}

double SweepRow::localization_fraction() const {
  return ensemble ? ensemble->localization_fraction : kNaN;
}

std::vector<double> default_mass_grid() {
  return {1.7e-23, 1e-21, 1e-19, 1e-17, 1e-15, 1e-13, 1e-11, 1e-9, 1e-7};
}

ScenarioConfig with_axis_value(const ScenarioConfig& base, SweepAxis axis, double value) {
  ScenarioConfig c = base;
  switch (axis) {
    case SweepAxis::Mass: c.object.mass = value; break;
    case SweepAxis::Diameter: c.object.internal_radius = 0.5 * value; break;
    case SweepAxis::Rate: c.environment.collision_rate = value; break;
  }
  return c;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, SweepAxis axis,
                            std::span<const double> values, std::size_t n_replicas,
                            std::size_t threads) {
  if (values.empty()) throw DomainError("sweep needs at least one value");
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("sweep values must be positive");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<SweepRow> rows;
  rows.reserve(sorted.size());
  for (double v : sorted) {
    SweepRow row;
    row.value = v;
    try {
      row.ensemble = run_ensemble(with_axis_value(base, axis, v), n_replicas, base.seed, threads);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_table(std::span<const SweepRow> rows, SweepAxis axis, std::ostream& sink) {
  sink << to_string(axis)
       << ",mean_recovery_ratio,localization_fraction,firing_fraction,mean_final_sigma_m,n_failed,"
          "error\n";
  for (const auto& row : rows) {
    const auto* e = row.ensemble ? &*row.ensemble : nullptr;
    std::string error = row.error;
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    sink << real(row.value) << ',' << real(row.mean_recovery_ratio()) << ','
         << real(row.localization_fraction()) << ',' << real(e ? e->firing_fraction : kNaN) << ','
         << real(e ? e->mean_final_sigma : kNaN) << ',' << (e ? e->n_failed : 0) << ',' << error
         << '\n';
  }
  if (!sink) throw IoError("failed writing sweep table");
}

}  // namespace dcollapse
