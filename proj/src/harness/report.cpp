#include "mflab/harness/report.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mflab/error.hpp"
#include "mflab/numfmt.hpp"

namespace mflab::harness {

namespace {

template <class T>
T parse_field(const std::string& s, std::size_t line) {
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("csv line " + std::to_string(line) + ": cannot parse '" + s + "'");
  return value;
}

Json row_json(const Row& r) {
  return {{"n", r.n},
          {"m", r.m},
          {"t", r.t},
          {"trace_dist", r.trace_dist},
          {"hs_dist", r.hs_dist},
          {"op_dist", r.op_dist},
          {"cross_term", r.cross_term},
          {"bound_envelope", r.bound_envelope},
          {"runtime_s", r.runtime_s},
          {"config_hash", r.config_hash}};
}

Row row_from_json(const Json& j) {
  Row r;
  r.n = j.at("n").get<int>();
  r.m = j.at("m").get<int>();
  r.t = j.at("t").get<double>();
  r.trace_dist = j.at("trace_dist").get<double>();
  r.hs_dist = j.at("hs_dist").get<double>();
  r.op_dist = j.at("op_dist").get<double>();
  r.cross_term = j.at("cross_term").get<double>();
  r.bound_envelope = j.at("bound_envelope").get<double>();
  r.runtime_s = j.at("runtime_s").get<double>();
  r.config_hash = j.at("config_hash").get<std::string>();
  return r;
}

Json header_json(const ConvergenceReport& r) {
  return {{"experiment", r.experiment},
          {"metric", to_string(r.metric)},
          {"config_hash", r.config_hash},
          {"summary", r.summary},
          {"metadata", r.metadata}};
}

void apply_header(ConvergenceReport& r, const Json& j) {
  r.experiment = j.value("experiment", "");
  r.metric = parse_metric(j.value("metric", "trace"));
  r.config_hash = j.value("config_hash", "");
  r.summary = j.value("summary", Json::object());
  r.metadata = j.value("metadata", Json::object());
}

std::filesystem::path sidecar_for(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".meta.json");
  return p;
}

}  // namespace

void write_csv(const ConvergenceReport& report, std::ostream& os, bool record_timing) {
  os << kCsvHeader << '\n';
  for (const auto& r : report.rows) {
    os << r.n << ',' << r.m << ',' << shortest(r.t) << ',' << shortest(r.trace_dist) << ',' << shortest(r.hs_dist)
       << ',' << shortest(r.op_dist) << ',' << shortest(r.cross_term) << ',' << shortest(r.bound_envelope) << ','
       << (record_timing ? shortest(r.runtime_s) : std::string("0")) << '\n';
  }
}

std::vector<Row> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw ConfigError("csv: unexpected header '" + line + "'");
  std::vector<Row> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 9) throw ConfigError("csv line " + std::to_string(lineno) + ": expected 9 fields");
    Row r;
    r.n = parse_field<int>(f[0], lineno);
    r.m = parse_field<int>(f[1], lineno);
    r.t = parse_field<double>(f[2], lineno);
    r.trace_dist = parse_field<double>(f[3], lineno);
    r.hs_dist = parse_field<double>(f[4], lineno);
    r.op_dist = parse_field<double>(f[5], lineno);
    r.cross_term = parse_field<double>(f[6], lineno);
    r.bound_envelope = parse_field<double>(f[7], lineno);
    r.runtime_s = parse_field<double>(f[8], lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

Json report_json(const ConvergenceReport& report) {
  Json j = header_json(report);
  Json rows = Json::array();
  for (const auto& r : report.rows) rows.push_back(row_json(r));
  j["rows"] = rows;
  return j;
}

ConvergenceReport report_from_json(const Json& j) {
  ConvergenceReport r;
  try {
    apply_header(r, j);
    for (const auto& row : j.at("rows")) r.rows.push_back(row_from_json(row));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("report json: ") + e.what());
  }
  return r;
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError("unknown output format '" + s + "' (csv or json)");
}

std::filesystem::path write_report(const ConvergenceReport& report, const std::filesystem::path& dir,
                                   const std::string& stem, OutputFormat format, bool record_timing) {
  std::filesystem::create_directories(dir);
  const auto main = dir / (stem + (format == OutputFormat::csv ? ".csv" : ".json"));
  {
    std::ofstream out(main, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + main.string() + "'");
    if (format == OutputFormat::csv) {
      write_csv(report, out, record_timing);
    } else {
      out << report_json(report).dump(2) << '\n';
    }
  }
  if (format == OutputFormat::csv) {
    std::ofstream side(sidecar_for(main), std::ios::binary);
    side << header_json(report).dump(2) << '\n';
  }
  return main;
}

ConvergenceReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  if (path.extension() == ".json") {
    try {
      return report_from_json(Json::parse(in));
    } catch (const Json::parse_error& e) {
      throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
  }
  ConvergenceReport r;
  r.rows = read_csv(in);
  if (std::ifstream side(sidecar_for(path)); side) {
    try {
      apply_header(r, Json::parse(side));
    } catch (const Json::exception& e) {
      throw ConfigError("bad sidecar for '" + path.string() + "': " + e.what());
    }
  }
  for (auto& row : r.rows) row.config_hash = r.config_hash;
  return r;
}

}  // namespace mflab::harness
