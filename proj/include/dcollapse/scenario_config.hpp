#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcollapse/core_model.hpp"
#include "dcollapse/environment.hpp"

namespace dcollapse {

enum class OutputFormat { Csv, Json };

/// Full input of one simulation run.
///
/// `object.cluster_alphas` may be left empty, in which case the run draws
/// n_clusters phases from its seed; likewise an empty `initial_alpha`.
struct ScenarioConfig {
  ObjectSpec object;
  Vec3 initial_sigma{};
  std::optional<double> initial_alpha;
  EnvironmentSpec environment;
  double duration = 0.0;  // s
  std::uint64_t seed = 0;
  double sample_interval = 0.0;  // s
  double cluster_eta = 0.5;
  std::string output_path = "-";
  OutputFormat output_format = OutputFormat::Csv;
  /// Record every collision, not only collapses.
  bool record_collisions = false;
  /// Re-draw the object's phase constant after each collapse.
  bool redraw_phase_on_collapse = false;
  std::uint64_t max_collisions = 1'000'000'000;
  /// Defaults to object.internal_radius.
  std::optional<double> localization_threshold;

  double effective_localization_threshold() const {
    return localization_threshold.value_or(object.internal_radius);
  }

  /// Every broken invariant, each naming its field. Empty when valid.
  std::vector<std::string> validation_errors() const;
  /// Throws ConfigError carrying all validation_errors().
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

}  // namespace dcollapse
