#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcollapse/core_model.hpp"
#include "dcollapse/environment.hpp"
#include "dcollapse/overlap_criterion.hpp"
#include "dcollapse/scenario_config.hpp"

namespace dcollapse {

/// CM_PHASE while the CM function covers the internal function, i.e.
/// min-axis width >= internal radius; CLUSTER_PHASE otherwise.
enum class Regime { CmPhase, ClusterPhase };

enum class EventKind { None, CollisionNoCollapse, Collapse };

const char* to_string(Regime regime);
const char* to_string(EventKind kind);
std::optional<Regime> parse_regime(std::string_view text);
std::optional<EventKind> parse_event_kind(std::string_view text);

Regime regime_of(const GaussianPacket& packet, const ObjectSpec& object);

struct SimState {
  double t = 0.0;
  GaussianPacket object_packet;
  ObjectSpec object_spec;
  std::uint64_t n_collisions = 0;
  std::uint64_t n_collapses = 0;
  Regime regime = Regime::CmPhase;
  RngState rng;
};

struct TimeSeriesRecord {
  double t;
  Vec3 sigma;
  std::uint64_t n_collisions;
  std::uint64_t n_collapses;
  Regime regime;
  EventKind last_event;

  bool operator==(const TimeSeriesRecord&) const = default;
};

struct EngineParams {
  double cluster_eta = 0.5;
  bool redraw_phase_on_collapse = false;
};

/// What happened at one collision, for statistics and observers.
struct CollisionDetails {
  double time;
  Vec3 sigma_before;  // object width at the collision instant
  Vec3 waist_before;  // width just after the previous contraction, or at creation
  Vec3 sigma_after;
  Regime regime;      // regime at the collision instant
  double comparison_alpha;
  CriterionOutcome outcome;
  GaussianPacket env_packet;

  /// min-axis sigma_before / min-axis waist_before.
  double recovery_ratio() const { return min_component(sigma_before) / min_component(waist_before); }
};

struct StepResult {
  SimState state;
  TimeSeriesRecord record;
  CollisionDetails details;
};

/// Positions consumed by apply_collision (cluster choice and phase re-draw).
inline constexpr std::uint64_t kDrawsPerStep = 2;

/// Processes a given collision: free evolution to the event time, criterion
/// against the current comparison phase, and contraction on firing. In
/// CLUSTER_PHASE the comparison phase is a uniformly chosen cluster phase and
/// the contraction is damped by cluster_shrink_factor. Throws NumericalError
/// on non-finite state.
StepResult apply_collision(const SimState& state, const CollisionEvent& event,
                           const EngineParams& params,
                           const PhysicalConstants& constants = kCodata2018);

/// Draws the next collision and applies it. nullopt when the collision rate
/// is zero.
std::optional<StepResult> step(const SimState& state, const EnvironmentSpec& spec,
                               const EngineParams& params,
                               const PhysicalConstants& constants = kCodata2018);

/// Damping exponent applied to contractions in CLUSTER_PHASE. Throws
/// ContractViolation in CM_PHASE.
double cluster_shrink_factor(const SimState& state, const ScenarioConfig& config);
double cluster_shrink_factor(const SimState& state, const EngineParams& params);

struct RunSummary {
  std::uint64_t seed = 0;
  double t_end = 0.0;
  Vec3 final_sigma{};
  double final_min_sigma = 0.0;
  double min_sigma = 0.0;  // smallest min-axis width seen during the run
  std::uint64_t n_collisions = 0;
  std::uint64_t n_collapses = 0;
  /// Mean over collisions of CollisionDetails::recovery_ratio; NaN if none.
  double mean_recovery_ratio = 0.0;
  /// Mean of (width before collapse k+1) / (width after collapse k); NaN if < 2 collapses.
  double mean_respread_ratio = 0.0;
  double mean_sigma_before_collapse = 0.0;  // NaN if no collapse
  double mean_sigma_after_collapse = 0.0;   // NaN if no collapse
  bool localized = false;
  bool budget_exhausted = false;
  Regime final_regime = Regime::CmPhase;
  double object_alpha = 0.0;
  std::vector<double> cluster_alphas;
};

struct RunResult {
  RunSummary summary;
  std::vector<TimeSeriesRecord> records;
};

struct RunOptions {
  bool keep_records = true;
  std::function<void(const StepResult&)> observer;
};

SimState initial_state(const ScenarioConfig& config);

/// Event-driven run to config.duration (or until max_collisions). Records the
/// initial state, every collapse (every collision with record_collisions),
/// samples at multiples of sample_interval, and the final state. Throws
/// ConfigError before stepping if the config is invalid.
RunResult run(const ScenarioConfig& config, const RunOptions& options = {},
              const PhysicalConstants& constants = kCodata2018);

struct ReplicaOutcome {
  std::uint64_t seed = 0;
  std::optional<RunSummary> summary;
  std::string error;
};

struct EnsembleSummary {
  std::size_t n_replicas = 0;
  std::size_t n_failed = 0;
  std::vector<ReplicaOutcome> replicas;  // in seed order
  double mean_final_sigma = 0.0;
  double q05_final_sigma = 0.0;
  double q50_final_sigma = 0.0;
  double q95_final_sigma = 0.0;
  double mean_collapses = 0.0;
  std::uint64_t total_collisions = 0;
  std::uint64_t total_collapses = 0;
  double firing_fraction = 0.0;      // NaN without collisions
  double mean_recovery_ratio = 0.0;  // over replicas with collisions; NaN if none
  double localization_fraction = 0.0;
};

/// Runs replicas with seeds base_seed + i on up to `threads` workers
/// (0 = hardware concurrency). Aggregation happens in seed order, so the
/// result does not depend on scheduling. A failing replica is reported in
/// its ReplicaOutcome and excluded from the aggregates.
EnsembleSummary run_ensemble(const ScenarioConfig& config, std::size_t n_replicas,
                             std::uint64_t base_seed, std::size_t threads = 0);

}  // namespace dcollapse
