// Command-line front end: run a scenario, sweep a parameter, or self-test.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcollapse/engine.hpp"
#include "dcollapse/errors.hpp"
#include "dcollapse/records_io.hpp"
#include "dcollapse/scenario.hpp"
#include "dcollapse/selftest.hpp"
#include "dcollapse/sweep.hpp"

namespace {

using namespace dcollapse;

constexpr int kExitRuntimeError = 1;
constexpr int kExitConfigError = 2;

struct CommonFlags {
  std::string scenario;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration_s;
  std::optional<double> rate_hz;
  std::optional<std::string> output;
  std::optional<std::string> format;
  std::size_t replicas = 1;
  std::optional<double> eta;
  bool record_collisions = false;
};

void add_common_flags(CLI::App& cmd, CommonFlags& f) {
  auto* scenario = cmd.add_option("--scenario", f.scenario, "Preset name (tpp, sugar_grain)");
  auto* config = cmd.add_option("--config", f.config_path, "Path to a JSON scenario file");
  scenario->excludes(config);
  cmd.add_option("--seed", f.seed, "Random seed (base seed for ensembles)");
  cmd.add_option("--duration-s", f.duration_s, "Simulated duration in seconds");
  cmd.add_option("--rate-hz", f.rate_hz, "Environment collision rate in 1/s");
  cmd.add_option("--output", f.output, "Output path, - for stdout");
  cmd.add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd.add_option("--eta", f.eta, "Cluster-regime damping exponent in (0, 1]");
  cmd.add_flag("--record-collisions", f.record_collisions,
               "Record every collision, not only collapses");
}

ScenarioConfig load_config(const CommonFlags& f) {
  ScenarioConfig c;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw ConfigError({"cannot open config file \"" + f.config_path + "\""});
    std::stringstream text;
    text << in.rdbuf();
    c = parse_config(text.str());
  } else if (!f.scenario.empty()) {
    c = preset(f.scenario);
  } else {
    throw ConfigError({"one of --scenario or --config is required"});
  }
  if (f.seed) c.seed = *f.seed;
  if (f.duration_s) c.duration = *f.duration_s;
  if (f.rate_hz) c.environment.collision_rate = *f.rate_hz;
  if (f.output) c.output_path = *f.output;
  if (f.format) c.output_format = parse_output_format(*f.format);
  if (f.eta) c.cluster_eta = *f.eta;
  if (f.record_collisions) c.record_collisions = true;
  if (f.replicas < 1) throw ConfigError({"--replicas must be at least 1"});
  c.validate();
  return c;
}

template <class Write>
void with_sink(const std::string& path, Write&& write) {
  if (path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file \"" + path + "\"");
  write(out);
}

int cmd_run(const CommonFlags& f) {
  const ScenarioConfig c = load_config(f);
  if (f.replicas > 1) {
    const EnsembleSummary e = run_ensemble(c, f.replicas, c.seed);
    with_sink(c.output_path, [&](std::ostream& os) { os << to_json(e).dump(2) << '\n'; });
    for (const auto& r : e.replicas) {
      if (!r.summary) std::cerr << "replica seed " << r.seed << " failed: " << r.error << '\n';
    }
    return e.n_failed == 0 ? 0 : kExitRuntimeError;
  }
  const RunResult r = run(c);
  with_sink(c.output_path, [&](std::ostream& os) { write_records(r.records, c.output_format, os); });
  std::cerr << to_json(r.summary).dump() << '\n';
  return 0;
}

int cmd_sweep(const CommonFlags& f, const std::string& axis_name, const std::vector<double>& values) {
  const ScenarioConfig c = load_config(f);
  const SweepAxis axis = parse_sweep_axis(axis_name);
  const std::vector<double> grid =
      values.empty() && axis == SweepAxis::Mass ? default_mass_grid() : values;
  if (grid.empty()) throw ConfigError({"--values is required for this axis"});
  const auto rows = sweep(c, axis, grid, f.replicas);
  with_sink(c.output_path, [&](std::ostream& os) { write_sweep_table(rows, axis, os); });
  bool failed = false;
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      std::cerr << "value " << row.value << " failed: " << row.error << '\n';
      failed = true;
    } else if (row.ensemble->n_failed > 0) {
      failed = true;
    }
  }
  return failed ? kExitRuntimeError : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-driven simulator of criterion-gated wavepacket collapse"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Run one scenario (or an ensemble with --replicas)");
  add_common_flags(*run_cmd, run_flags);
  run_cmd->add_option("--replicas", run_flags.replicas, "Number of replicas");

  CommonFlags sweep_flags;
  sweep_flags.replicas = 4;
  std::string axis = "mass";
  std::vector<double> values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Ensemble summary per value of one parameter");
  add_common_flags(*sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--replicas", sweep_flags.replicas, "Replicas per value");
  sweep_cmd->add_option("--axis", axis, "mass, diameter, or rate");
  sweep_cmd->add_option("--values", values, "Comma-separated values (default mass grid)")
      ->delimiter(',');

  auto* selftest_cmd = app.add_subcommand("selftest", "Run analytic and statistical self-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfigError;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_flags);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_flags, axis, values);
    if (selftest_cmd->parsed()) return run_selftest(std::cout) ? 0 : kExitRuntimeError;
  } catch (const ConfigError& e) {
    for (const auto& m : e.messages()) std::cerr << "error: " << m << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return 0;
}
