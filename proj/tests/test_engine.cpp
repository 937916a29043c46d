#include <cmath>
#include <vector>

#include <doctest.h>

#include "dcollapse/engine.hpp"
#include "dcollapse/errors.hpp"
#include "dcollapse/records_io.hpp"
#include "dcollapse/scenario.hpp"

using namespace dcollapse;

namespace {

SimState make_state(double sigma, double mass, double alpha, double internal_radius = 2.5e-9,
                    std::vector<double> clusters = {0.5}) {
  ObjectSpec obj{mass, internal_radius, 10.0, clusters.size(), clusters};
  const auto p = GaussianPacket::create(Vec3{}, Vec3{sigma, sigma, sigma}, Vec3{10, 0, 0}, mass, alpha);
  return SimState{0.0, p, obj, 0, 0, regime_of(p, obj), RngState(1)};
}

CollisionEvent event_at(const SimState& s, double t, double env_sigma, double alpha) {
  const auto at = evolve_free(s.object_packet, t);
  return CollisionEvent{
      t,
      GaussianPacket::create(at.center(), Vec3{env_sigma, env_sigma, env_sigma}, Vec3{}, 4.65e-26,
                             alpha, t),
      s.n_collisions + 1};
}

ScenarioConfig small_config() {
  ScenarioConfig c = preset("tpp");
  c.duration = 0.05;
  c.environment.collision_rate = 2e4;
  c.sample_interval = 0.005;
  return c;
}

}  // namespace

TEST_CASE("apply_collision") {
  SUBCASE("phase mismatch: counted, no collapse, free spreading only") {
    const auto s = make_state(1e-6, 1.7e-23, 1.0);
    const auto r = apply_collision(s, event_at(s, 1e-3, 1e-10, 4.0), EngineParams{});
    CHECK(r.state.n_collisions == 1);
    CHECK(r.state.n_collapses == 0);
    CHECK(r.state.object_packet.sigma() == evolve_free(s.object_packet, 1e-3).sigma());
    CHECK(r.record.last_event == EventKind::CollisionNoCollapse);
    CHECK(r.state.rng.position() == s.rng.position() + kDrawsPerStep);
  }

  SUBCASE("firing on a broad micro packet localizes it to the env scale") {
    // alpha_obj = 0 makes alpha_min = 0, so only the phase clause matters.
    const auto s = make_state(1e-6, 1.7e-23, 0.0);
    const auto r = apply_collision(s, event_at(s, 1e-9, 1e-10, 0.001), EngineParams{});
    REQUIRE(r.details.outcome.fires());
    CHECK(r.state.n_collapses == 1);
    CHECK(r.state.object_packet.sigma()[0] == doctest::Approx(1e-10).epsilon(1e-5));
    CHECK(r.state.object_packet.t_ref() == 1e-9);
    CHECK(r.state.regime == Regime::ClusterPhase);
    CHECK(r.details.regime == Regime::CmPhase);
    CHECK(r.record.last_event == EventKind::Collapse);
    for (std::size_t i = 0; i < 3; ++i) CHECK(r.details.sigma_after[i] <= r.details.sigma_before[i]);
  }

  SUBCASE("cluster regime compares a cluster phase and damps the contraction") {
    // sigma 4e-10 < internal radius: cluster regime. Object phase would fail,
    // the only cluster phase matches.
    const auto s = make_state(4e-10, 1e-7, 3.0, 1e-6, {0.2});
    REQUIRE(s.regime == Regime::ClusterPhase);
    const double env_sigma = 4e-10 / std::sqrt(15.0);  // product width = 1e-10
    const auto r = apply_collision(s, event_at(s, 1e-6, env_sigma, 0.2), EngineParams{0.5, false});
    REQUIRE(r.details.outcome.fires());
    CHECK(r.details.comparison_alpha == 0.2);
    CHECK(r.state.object_packet.sigma()[0] == doctest::Approx(2e-10).epsilon(1e-9));
    CHECK(r.state.object_packet.alpha() == 3.0);
  }

  SUBCASE("phase re-draw hook") {
    const auto s = make_state(1e-6, 1.7e-23, 0.0);
    const auto r = apply_collision(s, event_at(s, 1e-9, 1e-10, 0.001), EngineParams{0.5, true});
    REQUIRE(r.details.outcome.fires());
    CHECK(r.state.object_packet.alpha() != 0.0);
  }
}

TEST_CASE("cluster_shrink_factor") {
  auto s = make_state(4e-10, 1e-7, 3.0, 1e-6);
  ScenarioConfig c = small_config();
  c.cluster_eta = 0.25;
  CHECK(cluster_shrink_factor(s, c) == 0.25);
  s = make_state(4e-6, 1e-7, 3.0, 1e-6);
  CHECK_THROWS_AS(cluster_shrink_factor(s, c), ContractViolation);
}

TEST_CASE("step draws from the environment stream") {
  const auto s = make_state(1e-6, 1.7e-23, 1.0);
  EnvironmentSpec env;
  env.collision_rate = 1e6;
  env.env_sigma = {5e-11, 5e-11, 5e-11};
  const auto r = step(s, env, EngineParams{});
  REQUIRE(r.has_value());
  CHECK(r->state.t > 0.0);
  CHECK(r->state.rng.position() == s.rng.position() + kDrawsPerCollision + kDrawsPerStep);
  env.collision_rate = 0.0;
  CHECK_FALSE(step(s, env, EngineParams{}).has_value());
}

TEST_CASE("run: no collisions before the end") {
  ScenarioConfig c = small_config();
  c.environment.collision_rate = 1e-6;
  c.seed = 3;
  const auto r = run(c);
  CHECK(r.summary.n_collapses == 0);
  CHECK(r.summary.n_collisions == 0);
  // initial record plus samples at 0.005 ... 0.05
  REQUIRE(r.records.size() == 11);
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    CHECK(r.records[i].last_event == EventKind::None);
    CHECK(r.records[i].t == doctest::Approx(0.005 * static_cast<double>(i)));
  }
  CHECK(std::isnan(r.summary.mean_recovery_ratio));
}

TEST_CASE("run: records and invariants") {
  ScenarioConfig c = small_config();
  c.record_collisions = true;
  c.environment.collision_rate = 1e4;

  std::vector<StepResult> steps;
  const auto r = run(c, RunOptions{true, [&](const StepResult& s) { steps.push_back(s); }});
  CHECK(r.summary.n_collisions == steps.size());
  CHECK(r.summary.n_collisions > 300);
  for (std::size_t i = 1; i < r.records.size(); ++i) REQUIRE(r.records[i].t >= r.records[i - 1].t);
  for (const auto& rec : r.records) {
    const bool cluster = min_component(rec.sigma) < c.object.internal_radius;
    REQUIRE((rec.regime == Regime::ClusterPhase) == cluster);
    REQUIRE(rec.n_collapses <= rec.n_collisions);
  }

  // Between events widths follow the free law from the last waist.
  SimState replay = initial_state(c);
  for (const auto& s : steps) {
    const auto expected = evolve_free(replay.object_packet, s.details.time);
    REQUIRE(expected.sigma() == s.details.sigma_before);
    replay = s.state;
  }
}

TEST_CASE("run: sugar grain collapses only ever shrink") {
  ScenarioConfig c = preset("sugar_grain");
  c.duration = 0.5;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    c.seed = seed;
    std::vector<double> after;
    std::size_t violations = 0;
    run(c, RunOptions{false, [&](const StepResult& s) {
          if (!s.details.outcome.fires()) return;
          for (std::size_t i = 0; i < 3; ++i) {
            if (s.details.sigma_after[i] > s.details.sigma_before[i]) ++violations;
          }
          after.push_back(min_component(s.details.sigma_after));
        }});
    CHECK(violations == 0);
    CHECK_FALSE(after.empty());
    for (std::size_t i = 1; i < after.size(); ++i) REQUIRE(after[i] <= after[i - 1]);
  }
}

TEST_CASE("run: a contracted micro object re-spreads between collapses") {
  // tpp prepared at the 5e-11 m scale of the environment; alpha = 0 removes
  // the amplitude clause so collapses recur at rate alpha_s/(2 pi) * rate.
  // v_S (d = 1e-10) ~ 6.2e-2 m/s times 1/rate = 6.2e-8 m >> 2 * 5e-11 m.
  ScenarioConfig c = preset("tpp");
  c.initial_sigma = {5e-11, 5e-11, 5e-11};
  c.initial_alpha = 0.0;
  c.duration = 0.1;
  c.environment.collision_rate = 1e6;
  const auto r = run(c, RunOptions{false, {}});
  REQUIRE(r.summary.n_collapses >= 10);
  CHECK(r.summary.mean_sigma_before_collapse >= 2.0 * r.summary.mean_sigma_after_collapse);
  CHECK(r.summary.mean_respread_ratio > 10.0);
}

TEST_CASE("run: determinism and validation") {
  ScenarioConfig c = small_config();
  c.seed = 11;
  const auto a = run(c);
  const auto b = run(c);
  CHECK(a.records == b.records);
  CHECK(to_json(a.summary) == to_json(b.summary));

  c.duration = -1.0;
  c.object.mass = 0.0;
  try {
    run(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.messages().size() == 2);
  }
}

TEST_CASE("run: collision budget") {
  ScenarioConfig c = small_config();
  c.max_collisions = 25;
  const auto r = run(c);
  CHECK(r.summary.n_collisions == 25);
  CHECK(r.summary.budget_exhausted);
  CHECK(r.summary.t_end < c.duration);
}

TEST_CASE("run: non-finite state aborts with diagnostics") {
  ScenarioConfig c = small_config();
  c.object.mass = 1e-300;
  c.initial_sigma = {1e-300, 1e-300, 1e-300};
  CHECK_THROWS_AS(run(c), NumericalError);
}

TEST_CASE("run_ensemble") {
  ScenarioConfig c = small_config();
  SUBCASE("one replica equals a plain run") {
    const auto e = run_ensemble(c, 1, 40);
    ScenarioConfig single = c;
    single.seed = 40;
    REQUIRE(e.replicas[0].summary.has_value());
    CHECK(to_json(*e.replicas[0].summary) == to_json(run(single).summary));
  }

  SUBCASE("same base seed, same summary, any thread count") {
    const auto a = run_ensemble(c, 4, 9, 1);
    const auto b = run_ensemble(c, 4, 9, 3);
    CHECK(to_json(a) == to_json(b));
    CHECK(a.n_failed == 0);
  }

  SUBCASE("failed replicas are reported") {
    ScenarioConfig bad = c;
    bad.object.mass = 1e-300;
    bad.initial_sigma = {1e-300, 1e-300, 1e-300};
    const auto e = run_ensemble(bad, 2, 0);
    CHECK(e.n_failed == 2);
    CHECK_FALSE(e.replicas[1].error.empty());
  }

  SUBCASE("firing fraction with overlap pinned at 1") {
    ScenarioConfig p = preset("sugar_grain");
    p.environment.match_object_width = true;
    p.duration = 0.125;
    const auto e = run_ensemble(p, 8, 100);
    REQUIRE(e.total_collisions >= 1'000'000);
    const double prob = kCodata2018.alpha_s / kTwoPi;
    const double n = static_cast<double>(e.total_collisions);
    const double sd = std::sqrt(n * prob * (1 - prob));
    CHECK(std::abs(static_cast<double>(e.total_collapses) - n * prob) <= 4 * sd);
  }
}
