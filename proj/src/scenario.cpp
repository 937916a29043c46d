#include "dcollapse/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "dcollapse/errors.hpp"

namespace dcollapse {

namespace {

using nlohmann::json;

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

void check_positive(std::vector<std::string>& errors, double v, const char* field) {
  if (!positive(v)) errors.push_back(std::string(field) + " must be positive and finite");
}

void check_positive(std::vector<std::string>& errors, const Vec3& v, const char* field) {
  for (double x : v) {
    if (!positive(x)) {
      errors.push_back(std::string(field) + " components must be positive and finite");
      return;
    }
  }
}

bool is_phase(double a) { return a >= 0.0 && a < kTwoPi; }

}  // namespace

std::vector<std::string> ScenarioConfig::validation_errors() const {
  std::vector<std::string> errors;
  check_positive(errors, object.mass, "mass_kg");
  check_positive(errors, object.internal_radius, "internal_radius_m");
  check_positive(errors, object.v0, "v0_m_per_s");
  if (object.n_clusters < 1) errors.emplace_back("n_clusters must be at least 1");
  if (!object.cluster_alphas.empty()) {
    if (object.cluster_alphas.size() != object.n_clusters) {
      errors.emplace_back("cluster_alphas_rad must list exactly n_clusters phases");
    }
    if (!std::all_of(object.cluster_alphas.begin(), object.cluster_alphas.end(), is_phase)) {
      errors.emplace_back("cluster_alphas_rad entries must lie in [0, 2pi)");
    }
  }
  check_positive(errors, initial_sigma, "initial_sigma_m");
  if (initial_alpha && !is_phase(*initial_alpha)) {
    errors.emplace_back("initial_alpha_rad must lie in [0, 2pi)");
  }
  if (!(environment.collision_rate >= 0.0) || !std::isfinite(environment.collision_rate)) {
    errors.emplace_back("collision_rate_hz must be non-negative and finite");
  }
  check_positive(errors, environment.env_sigma, "env_sigma_m");
  if (!(environment.env_sigma_jitter >= 0.0 && environment.env_sigma_jitter < 1.0)) {
    errors.emplace_back("env_sigma_jitter must lie in [0, 1)");
  }
  if (!(environment.impact_spread >= 0.0) || !std::isfinite(environment.impact_spread)) {
    errors.emplace_back("impact_spread_m must be non-negative and finite");
  }
  check_positive(errors, environment.particle_mass, "env_particle_mass_kg");
  check_positive(errors, duration, "duration_s");
  check_positive(errors, sample_interval, "sample_interval_s");
  if (!(cluster_eta > 0.0 && cluster_eta <= 1.0)) errors.emplace_back("cluster_eta must lie in (0, 1]");
  if (max_collisions < 1) errors.emplace_back("max_collisions must be at least 1");
  if (localization_threshold) {
    check_positive(errors, *localization_threshold, "localization_threshold_m");
  }
  if (output_path.empty()) errors.emplace_back("output_path must not be empty");
  return errors;
}

void ScenarioConfig::validate() const {
  auto errors = validation_errors();
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  throw ConfigError({"output_format must be \"csv\" or \"json\", got \"" + std::string(text) + "\""});
}

const char* to_string(OutputFormat format) { return format == OutputFormat::Csv ? "csv" : "json"; }

std::vector<std::string> preset_names() { return {"sugar_grain", "tpp"}; }

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig c;
  c.environment.collision_rate = 1e6;
  c.environment.env_sigma = {5e-11, 5e-11, 5e-11};
  c.environment.env_sigma_jitter = 0.0;
  c.environment.impact_spread = 0.0;
  c.duration = 2.0;
  c.sample_interval = 0.01;
  c.cluster_eta = 0.5;
  c.seed = 1;

  if (name == "tpp") {
    const double diameter = 5e-9;
    c.object.mass = 1.7e-23;
    c.object.internal_radius = 0.5 * diameter;
    c.object.v0 = 10.0;
    c.object.n_clusters = 4;
    const double s = 100.0 * diameter;
    c.initial_sigma = {s, s, s};
    return c;
  }
  if (name == "sugar_grain") {
    const double diameter = 0.5e-3;
    c.object.mass = 1e-7;
    c.object.internal_radius = 0.5 * diameter;
    c.object.v0 = 10.0;
    c.object.n_clusters = 8;
    const double s = 5e-11;
    c.initial_sigma = {s, s, s};
    return c;
  }
  std::string available;
  for (const auto& n : preset_names()) available += (available.empty() ? "" : ", ") + n;
  throw ConfigError({"unknown scenario \"" + std::string(name) + "\"; available: " + available});
}

namespace {

// Reads typed fields out of the document, recording problems instead of throwing.
class FieldReader {
 public:
  FieldReader(const json& doc, std::vector<std::string>& errors) : doc_(doc), errors_(errors) {}

  bool has(const char* key) const { return doc_.contains(key); }

  void number(const char* key, double& out, bool required) {
    if (!present(key, required)) return;
    const json& v = doc_.at(key);
    if (!v.is_number()) return type_error(key, "a number");
    out = v.get<double>();
  }

  void vec3(const char* key, Vec3& out, bool required) {
    if (!present(key, required)) return;
    const json& v = doc_.at(key);
    if (v.is_number()) {
      out.fill(v.get<double>());
    } else if (v.is_array() && v.size() == 3 &&
               std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
      for (std::size_t i = 0; i < 3; ++i) out[i] = v[i].get<double>();
    } else {
      type_error(key, "a number or an array of three numbers");
    }
  }

  void boolean(const char* key, bool& out) {
    if (!present(key, false)) return;
    const json& v = doc_.at(key);
    if (!v.is_boolean()) return type_error(key, "true or false");
    out = v.get<bool>();
  }

  void unsigned_integer(const char* key, std::uint64_t& out, bool required) {
    if (!present(key, required)) return;
    const json& v = doc_.at(key);
    if (!v.is_number_unsigned()) return type_error(key, "a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void string(const char* key, std::string& out) {
    if (!present(key, false)) return;
    const json& v = doc_.at(key);
    if (!v.is_string()) return type_error(key, "a string");
    out = v.get<std::string>();
  }

  /// A number, or the string "random" (leaves `out` empty).
  void phase_or_random(const char* key, std::optional<double>& out) {
    if (!present(key, false)) return;
    const json& v = doc_.at(key);
    if (v.is_number()) {
      out = v.get<double>();
    } else if (v.is_string() && v.get<std::string>() == "random") {
      out.reset();
    } else {
      type_error(key, "a number or \"random\"");
    }
  }

  void phases_or_random(const char* key, std::vector<double>& out) {
    if (!present(key, false)) return;
    const json& v = doc_.at(key);
    if (v.is_string() && v.get<std::string>() == "random") {
      out.clear();
    } else if (v.is_array() &&
               std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
      out = v.get<std::vector<double>>();
    } else {
      type_error(key, "an array of numbers or \"random\"");
    }
  }

 private:
  bool present(const char* key, bool required) {
    if (doc_.contains(key)) return true;
    if (required) errors_.push_back(std::string(key) + " is required but missing");
    return false;
  }

  void type_error(const char* key, const char* expected) {
    errors_.push_back(std::string(key) + " must be " + expected);
  }

  const json& doc_;
  std::vector<std::string>& errors_;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "mass_kg",           "internal_radius_m",     "v0_m_per_s",
      "n_clusters",        "cluster_alphas_rad",    "initial_sigma_m",
      "initial_alpha_rad", "collision_rate_hz",     "env_sigma_m",
      "env_sigma_jitter",  "impact_spread_m",       "env_particle_mass_kg",
      "env_match_object_width", "duration_s",       "seed",
      "sample_interval_s", "cluster_eta",           "output_path",
      "output_format",     "record_collisions",     "redraw_phase_on_collapse",
      "max_collisions",    "localization_threshold_m"};
  return keys;
}

std::string describe_position(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError({"syntax error at " + describe_position(text, e.byte) + ": " + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({"config document must be a JSON object"});

  std::vector<std::string> errors;
  for (const auto& [key, value] : doc.items()) {
    if (!known_keys().contains(key)) errors.push_back("unknown key \"" + key + "\"");
  }

  ScenarioConfig c;
  FieldReader in(doc, errors);
  in.number("mass_kg", c.object.mass, true);
  in.number("internal_radius_m", c.object.internal_radius, true);
  in.number("v0_m_per_s", c.object.v0, true);
  std::uint64_t n_clusters = 1;
  in.unsigned_integer("n_clusters", n_clusters, false);
  c.object.n_clusters = static_cast<std::size_t>(n_clusters);
  in.phases_or_random("cluster_alphas_rad", c.object.cluster_alphas);
  in.vec3("initial_sigma_m", c.initial_sigma, true);
  in.phase_or_random("initial_alpha_rad", c.initial_alpha);
  in.number("collision_rate_hz", c.environment.collision_rate, true);
  in.vec3("env_sigma_m", c.environment.env_sigma, true);
  in.number("env_sigma_jitter", c.environment.env_sigma_jitter, false);
  in.number("impact_spread_m", c.environment.impact_spread, false);
  in.number("env_particle_mass_kg", c.environment.particle_mass, false);
  in.boolean("env_match_object_width", c.environment.match_object_width);
  in.number("duration_s", c.duration, true);
  in.unsigned_integer("seed", c.seed, false);
  in.number("sample_interval_s", c.sample_interval, false);
  in.number("cluster_eta", c.cluster_eta, false);
  in.string("output_path", c.output_path);
  std::string format = to_string(c.output_format);
  in.string("output_format", format);
  if (format == "csv" || format == "json") {
    c.output_format = parse_output_format(format);
  } else {
    errors.push_back("output_format must be \"csv\" or \"json\"");
  }
  in.boolean("record_collisions", c.record_collisions);
  in.boolean("redraw_phase_on_collapse", c.redraw_phase_on_collapse);
  in.unsigned_integer("max_collisions", c.max_collisions, false);
  if (in.has("localization_threshold_m")) {
    double threshold = 0.0;
    in.number("localization_threshold_m", threshold, false);
    c.localization_threshold = threshold;
  }
  if (!in.has("sample_interval_s")) c.sample_interval = positive(c.duration) ? c.duration / 100.0 : 1.0;

  // One message per field: skip range errors for fields already reported.
  const std::size_t reported = errors.size();
  for (auto& e : c.validation_errors()) {
    const std::string field = e.substr(0, e.find(' ') + 1);
    const bool seen = std::any_of(errors.begin(), errors.begin() + static_cast<std::ptrdiff_t>(reported),
                                  [&](const std::string& m) { return m.starts_with(field); });
    if (!seen) errors.push_back(std::move(e));
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

nlohmann::json config_to_json(const ScenarioConfig& c) {
  json doc;
  doc["mass_kg"] = c.object.mass;
  doc["internal_radius_m"] = c.object.internal_radius;
  doc["v0_m_per_s"] = c.object.v0;
  doc["n_clusters"] = c.object.n_clusters;
  if (c.object.cluster_alphas.empty()) {
    doc["cluster_alphas_rad"] = "random";
  } else {
    doc["cluster_alphas_rad"] = c.object.cluster_alphas;
  }
  doc["initial_sigma_m"] = c.initial_sigma;
  if (c.initial_alpha) {
    doc["initial_alpha_rad"] = *c.initial_alpha;
  } else {
    doc["initial_alpha_rad"] = "random";
  }
  doc["collision_rate_hz"] = c.environment.collision_rate;
  doc["env_sigma_m"] = c.environment.env_sigma;
  doc["env_sigma_jitter"] = c.environment.env_sigma_jitter;
  doc["impact_spread_m"] = c.environment.impact_spread;
  doc["env_particle_mass_kg"] = c.environment.particle_mass;
  doc["env_match_object_width"] = c.environment.match_object_width;
  doc["duration_s"] = c.duration;
  doc["seed"] = c.seed;
  doc["sample_interval_s"] = c.sample_interval;
  doc["cluster_eta"] = c.cluster_eta;
  doc["output_path"] = c.output_path;
  doc["output_format"] = to_string(c.output_format);
  doc["record_collisions"] = c.record_collisions;
  doc["redraw_phase_on_collapse"] = c.redraw_phase_on_collapse;
  doc["max_collisions"] = c.max_collisions;
  if (c.localization_threshold) doc["localization_threshold_m"] = *c.localization_threshold;
  return doc;
}

}  // namespace dcollapse
