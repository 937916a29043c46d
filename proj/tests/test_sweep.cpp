#include <sstream>
#include <vector>

#include <doctest.h>

#include "dcollapse/errors.hpp"
#include "dcollapse/records_io.hpp"
#include "dcollapse/scenario.hpp"
#include "dcollapse/sweep.hpp"

using namespace dcollapse;

namespace {

ScenarioConfig quick_tpp() {
  ScenarioConfig c = preset("tpp");
  c.duration = 0.5;
  c.environment.collision_rate = 2e4;
  c.sample_interval = 0.1;
  return c;
}

}  // namespace

TEST_CASE("axis parsing and application") {
  CHECK(parse_sweep_axis("mass") == SweepAxis::Mass);
  CHECK(parse_sweep_axis("RATE") == SweepAxis::Rate);
  CHECK_THROWS_AS(parse_sweep_axis("colour"), ConfigError);
  const auto base = quick_tpp();
  CHECK(with_axis_value(base, SweepAxis::Mass, 2.0).object.mass == 2.0);
  CHECK(with_axis_value(base, SweepAxis::Diameter, 2e-9).object.internal_radius == 1e-9);
  CHECK(with_axis_value(base, SweepAxis::Rate, 5.0).environment.collision_rate == 5.0);
}

TEST_CASE("single value sweep equals one ensemble") {
  const auto base = quick_tpp();
  const std::vector<double> v = {1.7e-23};
  const auto rows = sweep(base, SweepAxis::Mass, v, 2);
  REQUIRE(rows.size() == 1);
  CHECK(to_json(*rows[0].ensemble) == to_json(run_ensemble(base, 2, base.seed)));
}

TEST_CASE("rows sorted; smaller mass recovers more") {
  const std::vector<double> v = {1e-7, 1.7e-23};
  const auto rows = sweep(quick_tpp(), SweepAxis::Mass, v, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].value == 1.7e-23);
  CHECK(rows[1].value == 1e-7);
  CHECK(rows[0].mean_recovery_ratio() > rows[1].mean_recovery_ratio());
}

TEST_CASE("recovery ratio is non-increasing in mass over the default grid") {
  const auto grid = default_mass_grid();
  const auto rows = sweep(quick_tpp(), SweepAxis::Mass, grid, 2);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].mean_recovery_ratio() <= rows[i - 1].mean_recovery_ratio());
  }
  CHECK(rows.front().mean_recovery_ratio() > 1.5);
  CHECK(rows.back().mean_recovery_ratio() == doctest::Approx(1.0));
}

TEST_CASE("per-value failures do not abort the sweep") {
  auto base = quick_tpp();
  base.environment.collision_rate = 1.0;
  const std::vector<double> v = {1e-300, 1.0};
  base.object.mass = 1e-300;
  base.initial_sigma = {1e-300, 1e-300, 1e-300};
  const auto rows = sweep(base, SweepAxis::Rate, v, 1);
  REQUIRE(rows.size() == 2);
  std::ostringstream os;
  write_sweep_table(rows, SweepAxis::Rate, os);
  CHECK(os.str().find("collision_rate_hz,mean_recovery_ratio") == 0);

  CHECK_THROWS_AS(sweep(base, SweepAxis::Mass, std::vector<double>{}, 1), DomainError);
  CHECK_THROWS_AS(sweep(base, SweepAxis::Mass, std::vector<double>{-1.0}, 1), DomainError);
}
