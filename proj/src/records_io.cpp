#include "dcollapse/records_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dcollapse/errors.hpp"

namespace dcollapse {

namespace {

using nlohmann::json;

void append_real(std::string& out, double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  out.append(buf, res.ptr);
}

double parse_real(std::string_view text, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw IoError("line " + std::to_string(line) + ": bad number \"" + std::string(text) + "\"");
  }
  return v;
}

std::uint64_t parse_count(std::string_view text, std::size_t line) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw IoError("line " + std::to_string(line) + ": bad count \"" + std::string(text) + "\"");
  }
  return v;
}

json record_to_json(const TimeSeriesRecord& r) {
  return json{{"t_s", r.t},
              {"sigma_x_m", r.sigma[0]},
              {"sigma_y_m", r.sigma[1]},
              {"sigma_z_m", r.sigma[2]},
              {"n_collisions", r.n_collisions},
              {"n_collapses", r.n_collapses},
              {"regime", to_string(r.regime)},
              {"last_event", to_string(r.last_event)}};
}

json real_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

}  // namespace

void write_records(std::span<const TimeSeriesRecord> records, OutputFormat format,
                   std::ostream& sink) {
  auto fail = [&](std::size_t written) {
    throw IoError("failed writing records after " + std::to_string(written) + " of " +
                  std::to_string(records.size()) + "; output may be partial");
  };
  if (format == OutputFormat::Json) {
    json doc = json::array();
    for (const auto& r : records) doc.push_back(record_to_json(r));
    sink << doc.dump(1) << '\n';
    if (!sink) fail(0);
    return;
  }
  sink << kCsvHeader << '\n';
  if (!sink) fail(0);
  std::string line;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    line.clear();
    append_real(line, r.t);
    for (double s : r.sigma) {
      line += ',';
      append_real(line, s);
    }
    line += ',' + std::to_string(r.n_collisions) + ',' + std::to_string(r.n_collapses) + ',';
    line += to_string(r.regime);
    line += ',';
    line += to_string(r.last_event);
    line += '\n';
    sink << line;
    if (!sink) fail(i);
  }
  sink.flush();
  if (!sink) fail(records.size());
}

std::vector<TimeSeriesRecord> read_records(OutputFormat format, std::istream& source) {
  std::vector<TimeSeriesRecord> out;
  if (format == OutputFormat::Json) {
    json doc;
    try {
      doc = json::parse(source);
    } catch (const json::exception& e) {
      throw IoError(std::string("bad record JSON: ") + e.what());
    }
    if (!doc.is_array()) throw IoError("record JSON must be an array");
    for (const auto& item : doc) {
      try {
        const auto regime = parse_regime(item.at("regime").get<std::string>());
        const auto kind = parse_event_kind(item.at("last_event").get<std::string>());
        if (!regime || !kind) throw IoError("unknown regime or event name in record JSON");
        out.push_back(TimeSeriesRecord{item.at("t_s").get<double>(),
                                       {item.at("sigma_x_m").get<double>(),
                                        item.at("sigma_y_m").get<double>(),
                                        item.at("sigma_z_m").get<double>()},
                                       item.at("n_collisions").get<std::uint64_t>(),
                                       item.at("n_collapses").get<std::uint64_t>(),
                                       *regime,
                                       *kind});
      } catch (const json::exception& e) {
        throw IoError(std::string("bad record object: ") + e.what());
      }
    }
    return out;
  }

  std::string line;
  if (!std::getline(source, line) || line != kCsvHeader) throw IoError("missing or wrong CSV header");
  std::size_t line_no = 1;
  while (std::getline(source, line)) {
    ++line_no;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != 8) {
      throw IoError("line " + std::to_string(line_no) + ": expected 8 fields, got " +
                    std::to_string(cells.size()));
    }
    const auto regime = parse_regime(cells[6]);
    const auto kind = parse_event_kind(cells[7]);
    if (!regime || !kind) throw IoError("line " + std::to_string(line_no) + ": unknown enum value");
    out.push_back(TimeSeriesRecord{parse_real(cells[0], line_no),
                                   {parse_real(cells[1], line_no), parse_real(cells[2], line_no),
                                    parse_real(cells[3], line_no)},
                                   parse_count(cells[4], line_no),
                                   parse_count(cells[5], line_no),
                                   *regime,
                                   *kind});
  }
  return out;
}

json to_json(const RunSummary& s) {
  return json{{"seed", s.seed},
              {"t_end_s", s.t_end},
              {"final_sigma_m", s.final_sigma},
              {"final_min_sigma_m", s.final_min_sigma},
              {"min_sigma_m", s.min_sigma},
              {"n_collisions", s.n_collisions},
              {"n_collapses", s.n_collapses},
              {"mean_recovery_ratio", real_or_null(s.mean_recovery_ratio)},
              {"mean_respread_ratio", real_or_null(s.mean_respread_ratio)},
              {"mean_sigma_before_collapse_m", real_or_null(s.mean_sigma_before_collapse)},
              {"mean_sigma_after_collapse_m", real_or_null(s.mean_sigma_after_collapse)},
              {"localized", s.localized},
              {"budget_exhausted", s.budget_exhausted},
              {"final_regime", to_string(s.final_regime)},
              {"object_alpha_rad", s.object_alpha},
              {"cluster_alphas_rad", s.cluster_alphas}};
}

json to_json(const EnsembleSummary& s) {
  json replicas = json::array();
  for (const auto& r : s.replicas) {
    json item{{"seed", r.seed}};
    if (r.summary) {
      item["summary"] = to_json(*r.summary);
    } else {
      item["error"] = r.error;
    }
    replicas.push_back(std::move(item));
  }
  return json{{"n_replicas", s.n_replicas},
              {"n_failed", s.n_failed},
              {"mean_final_sigma_m", real_or_null(s.mean_final_sigma)},
              {"q05_final_sigma_m", real_or_null(s.q05_final_sigma)},
              {"q50_final_sigma_m", real_or_null(s.q50_final_sigma)},
              {"q95_final_sigma_m", real_or_null(s.q95_final_sigma)},
              {"mean_collapses", real_or_null(s.mean_collapses)},
              {"total_collisions", s.total_collisions},
              {"total_collapses", s.total_collapses},
              {"firing_fraction", real_or_null(s.firing_fraction)},
              {"mean_recovery_ratio", real_or_null(s.mean_recovery_ratio)},
              {"localization_fraction", real_or_null(s.localization_fraction)},
              {"replicas", replicas}};
}

}  // namespace dcollapse
