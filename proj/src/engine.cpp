#include "dcollapse/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "dcollapse/collapse_contraction.hpp"
#include "dcollapse/errors.hpp"

namespace dcollapse {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_finite(const GaussianPacket& packet, std::uint64_t collision_index, double t) {
  if (all_finite(packet.sigma()) && all_finite(packet.center()) &&
      min_component(packet.sigma()) > 0.0) {
    return;
  }
  std::ostringstream msg;
  msg << "non-finite object state at t = " << t << " (collision " << collision_index
      << "): sigma = [" << packet.sigma()[0] << ", " << packet.sigma()[1] << ", "
      << packet.sigma()[2] << "], center = [" << packet.center()[0] << ", "
      << packet.center()[1] << ", " << packet.center()[2] << "]";
  throw NumericalError(msg.str());
}

TimeSeriesRecord record_of(const SimState& s, EventKind kind) {
  return TimeSeriesRecord{s.t,           s.object_packet.sigma(), s.n_collisions,
                          s.n_collapses, s.regime,                kind};
}

}  // namespace

const char* to_string(Regime regime) {
  return regime == Regime::CmPhase ? "CM_PHASE" : "CLUSTER_PHASE";
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::None: return "NONE";
    case EventKind::CollisionNoCollapse: return "COLLISION_NO_COLLAPSE";
    case EventKind::Collapse: return "COLLAPSE";
  }
  return "NONE";
}

std::optional<Regime> parse_regime(std::string_view text) {
  if (text == "CM_PHASE") return Regime::CmPhase;
  if (text == "CLUSTER_PHASE") return Regime::ClusterPhase;
  return std::nullopt;
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  if (text == "NONE") return EventKind::None;
  if (text == "COLLISION_NO_COLLAPSE") return EventKind::CollisionNoCollapse;
  if (text == "COLLAPSE") return EventKind::Collapse;
  return std::nullopt;
}

Regime regime_of(const GaussianPacket& packet, const ObjectSpec& object) {
  return packet.min_sigma() < object.internal_radius ? Regime::ClusterPhase : Regime::CmPhase;
}

double cluster_shrink_factor(const SimState& state, const EngineParams& params) {
  if (state.regime != Regime::ClusterPhase) {
    throw ContractViolation("cluster shrink factor requested outside the cluster regime");
  }
  if (!(params.cluster_eta > 0.0 && params.cluster_eta <= 1.0)) {
    throw DomainError("cluster_eta must lie in (0, 1]");
  }
  return params.cluster_eta;
}

double cluster_shrink_factor(const SimState& state, const ScenarioConfig& config) {
  return cluster_shrink_factor(state, EngineParams{config.cluster_eta, false});
}

StepResult apply_collision(const SimState& state, const CollisionEvent& event,
                           const EngineParams& params, const PhysicalConstants& constants) {
  SimState next = state;
  const double cluster_u = next.rng.next_uniform();
  const double redraw_u = next.rng.next_uniform();

  const GaussianPacket object = evolve_free(state.object_packet, event.time, constants);
  const std::uint64_t index = state.n_collisions + 1;
  check_finite(object, index, event.time);

  next.t = event.time;
  next.regime = regime_of(object, state.object_spec);
  next.n_collisions = index;

  double comparison_alpha = object.alpha();
  if (next.regime == Regime::ClusterPhase) {
    const auto& alphas = state.object_spec.cluster_alphas;
    const auto k = std::min(static_cast<std::size_t>(cluster_u * static_cast<double>(alphas.size())),
                            alphas.size() - 1);
    comparison_alpha = alphas[k];
  }
  const GaussianPacket probe = object.with_alpha(comparison_alpha);
  const CriterionOutcome outcome = evaluate_criterion(probe, event.env_packet, constants);

  GaussianPacket after = object;
  if (outcome.fires()) {
    const ContractionResult contraction =
        apply_collapse(probe, event.env_packet, event.time, outcome);
    Vec3 sigma = contraction.overlap_sigma;
    if (next.regime == Regime::ClusterPhase) {
      sigma = damped_contraction(object.sigma(), sigma, cluster_shrink_factor(next, params));
    }
    const double alpha = params.redraw_phase_on_collapse ? kTwoPi * redraw_u : object.alpha();
    after = GaussianPacket::create(contraction.overlap_center, sigma, object.velocity(),
                                   object.mass(), alpha, event.time);
    ++next.n_collapses;
    check_finite(after, index, event.time);
  }
  next.object_packet = after;
  next.regime = regime_of(after, state.object_spec);

  const EventKind kind = outcome.fires() ? EventKind::Collapse : EventKind::CollisionNoCollapse;
  CollisionDetails details{event.time,   object.sigma(),   object.waist(),
                           after.sigma(), regime_of(object, state.object_spec),
                           comparison_alpha, outcome,       event.env_packet};
  return StepResult{next, record_of(next, kind), details};
}

std::optional<StepResult> step(const SimState& state, const EnvironmentSpec& spec,
                               const EngineParams& params, const PhysicalConstants& constants) {
  auto [event, rng] =
      next_collision(state.rng, spec, state.t, state.object_packet, state.n_collisions + 1,
                     constants);
  if (!event) return std::nullopt;
  SimState advanced = state;
  advanced.rng = rng;
  return apply_collision(advanced, *event, params, constants);
}

SimState initial_state(const ScenarioConfig& config) {
  config.validate();
  RngState rng(config.seed);
  // Phase draws always consume their positions so that supplying a phase
  // does not shift the collision stream.
  auto [drawn_alpha, after_alpha] = draw_phase(rng);
  rng = after_alpha;
  const double alpha = config.initial_alpha.value_or(drawn_alpha);

  ObjectSpec object = config.object;
  std::vector<double> drawn;
  for (std::size_t i = 0; i < object.n_clusters; ++i) {
    auto [a, next] = draw_phase(rng);
    rng = next;
    drawn.push_back(a);
  }
  if (object.cluster_alphas.empty()) object.cluster_alphas = std::move(drawn);
  object.validate();

  const GaussianPacket packet = GaussianPacket::create(
      Vec3{}, config.initial_sigma, Vec3{object.v0, 0.0, 0.0}, object.mass, alpha, 0.0);
  return SimState{0.0, packet, object, 0, 0, regime_of(packet, object), rng};
}

RunResult run(const ScenarioConfig& config, const RunOptions& options,
              const PhysicalConstants& constants) {
  SimState state = initial_state(config);
  const EngineParams params{config.cluster_eta, config.redraw_phase_on_collapse};

  RunResult result;
  auto& records = result.records;
  auto emit = [&](const TimeSeriesRecord& r) {
    if (options.keep_records) records.push_back(r);
  };

  RunSummary& summary = result.summary;
  summary.seed = config.seed;
  summary.object_alpha = state.object_packet.alpha();
  summary.cluster_alphas = state.object_spec.cluster_alphas;
  summary.min_sigma = state.object_packet.min_sigma();

  std::uint64_t next_sample = 1;
  auto emit_samples_before = [&](double t_limit, bool inclusive) {
    for (;;) {
      const double ts = static_cast<double>(next_sample) * config.sample_interval;
      if (ts > config.duration || ts > t_limit || (!inclusive && ts == t_limit)) break;
      SimState sampled = state;
      sampled.object_packet = evolve_free(state.object_packet, ts, constants);
      sampled.t = ts;
      sampled.regime = regime_of(sampled.object_packet, state.object_spec);
      emit(record_of(sampled, EventKind::None));
      ++next_sample;
    }
  };

  emit(record_of(state, EventKind::None));

  double sum_recovery = 0.0;
  double sum_respread = 0.0;
  std::uint64_t n_respread = 0;
  double sum_before_collapse = 0.0;
  double sum_after_collapse = 0.0;
  std::optional<double> last_collapse_sigma;
  double t_end = config.duration;

  for (;;) {
    if (state.n_collisions >= config.max_collisions) {
      summary.budget_exhausted = true;
      t_end = state.t;
      break;
    }
    auto [event, rng] = next_collision(state.rng, config.environment, state.t,
                                       state.object_packet, state.n_collisions + 1, constants);
    if (!event || event->time > config.duration) break;
    emit_samples_before(event->time, false);

    SimState advanced = state;
    advanced.rng = rng;
    StepResult r = apply_collision(advanced, *event, params, constants);

    const CollisionDetails& d = r.details;
    sum_recovery += d.recovery_ratio();
    if (d.outcome.fires()) {
      const double before = min_component(d.sigma_before);
      const double after = min_component(d.sigma_after);
      sum_before_collapse += before;
      sum_after_collapse += after;
      if (last_collapse_sigma) {
        sum_respread += before / *last_collapse_sigma;
        ++n_respread;
      }
      last_collapse_sigma = after;
      summary.min_sigma = std::min(summary.min_sigma, after);
      emit(r.record);
    } else if (config.record_collisions) {
      emit(r.record);
    }
    if (options.observer) options.observer(r);
    state = std::move(r.state);
  }

  emit_samples_before(t_end, true);
  if (t_end > state.t) {
    state.object_packet = evolve_free(state.object_packet, t_end, constants);
    state.t = t_end;
    state.regime = regime_of(state.object_packet, state.object_spec);
  }
  if (records.empty() || records.back().t < state.t) emit(record_of(state, EventKind::None));

  summary.t_end = state.t;
  summary.final_sigma = state.object_packet.sigma();
  summary.final_min_sigma = state.object_packet.min_sigma();
  summary.n_collisions = state.n_collisions;
  summary.n_collapses = state.n_collapses;
  const auto mean = [](double sum, std::uint64_t n) {
    return n == 0 ? kNaN : sum / static_cast<double>(n);
  };
  summary.mean_recovery_ratio = mean(sum_recovery, state.n_collisions);
  summary.mean_respread_ratio = mean(sum_respread, n_respread);
  summary.mean_sigma_before_collapse = mean(sum_before_collapse, state.n_collapses);
  summary.mean_sigma_after_collapse = mean(sum_after_collapse, state.n_collapses);
  summary.localized = summary.final_min_sigma <= config.effective_localization_threshold();
  summary.final_regime = state.regime;
  return result;
}

EnsembleSummary run_ensemble(const ScenarioConfig& config, std::size_t n_replicas,
                             std::uint64_t base_seed, std::size_t threads) {
  if (n_replicas < 1) throw DomainError("an ensemble needs at least one replica");
  config.validate();

  std::vector<ReplicaOutcome> outcomes(n_replicas);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_replicas; i = next++) {
      ScenarioConfig replica = config;
      replica.seed = base_seed + i;
      outcomes[i].seed = replica.seed;
      try {
        outcomes[i].summary = run(replica, RunOptions{false, {}}).summary;
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n_replicas);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }

  EnsembleSummary out;
  out.n_replicas = n_replicas;
  std::vector<double> finals;
  double sum_final = 0.0;
  double sum_collapses = 0.0;
  double sum_recovery = 0.0;
  std::size_t n_recovery = 0;
  std::size_t n_localized = 0;
  for (const auto& o : outcomes) {
    if (!o.summary) {
      ++out.n_failed;
      continue;
    }
    const RunSummary& s = *o.summary;
    finals.push_back(s.final_min_sigma);
    sum_final += s.final_min_sigma;
    sum_collapses += static_cast<double>(s.n_collapses);
    out.total_collisions += s.n_collisions;
    out.total_collapses += s.n_collapses;
    if (!std::isnan(s.mean_recovery_ratio)) {
      sum_recovery += s.mean_recovery_ratio;
      ++n_recovery;
    }
    if (s.localized) ++n_localized;
  }
  const std::size_t ok = finals.size();
  if (ok > 0) {
    std::sort(finals.begin(), finals.end());
    const auto quantile = [&](double q) {
      const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(ok))) ;
      return finals[std::clamp<std::size_t>(idx, 1, ok) - 1];
    };
    out.mean_final_sigma = sum_final / static_cast<double>(ok);
    out.q05_final_sigma = quantile(0.05);
    out.q50_final_sigma = quantile(0.50);
    out.q95_final_sigma = quantile(0.95);
    out.mean_collapses = sum_collapses / static_cast<double>(ok);
    out.localization_fraction = static_cast<double>(n_localized) / static_cast<double>(ok);
  } else {
    out.mean_final_sigma = out.q05_final_sigma = out.q50_final_sigma = out.q95_final_sigma = kNaN;
    out.mean_collapses = out.localization_fraction = kNaN;
  }
  out.firing_fraction = out.total_collisions == 0
                            ? kNaN
                            : static_cast<double>(out.total_collapses) /
                                  static_cast<double>(out.total_collisions);
  out.mean_recovery_ratio = n_recovery == 0 ? kNaN : sum_recovery / static_cast<double>(n_recovery);
  out.replicas = std::move(outcomes);
  return out;
}

}  // namespace dcollapse
