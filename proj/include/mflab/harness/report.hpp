#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mflab/harness/sweep.hpp"

namespace mflab::harness {

inline constexpr const char* kCsvHeader = "n,m,t,trace_dist,hs_dist,op_dist,cross_term,bound_envelope,runtime_s";

// runtime_s is written as 0 unless record_timing is set, so that repeated
// runs produce identical bytes.
void write_csv(const ConvergenceReport& report, std::ostream& os, bool record_timing = false);
std::vector<Row> read_csv(std::istream& is);

Json report_json(const ConvergenceReport& report);
ConvergenceReport report_from_json(const Json& j);

enum class OutputFormat { csv, json };
OutputFormat parse_format(const std::string& s);

// Writes <dir>/<stem>.csv plus <stem>.meta.json, or <dir>/<stem>.json.
// Returns the main file.
std::filesystem::path write_report(const ConvergenceReport& report, const std::filesystem::path& dir,
                                   const std::string& stem, OutputFormat format, bool record_timing = false);
// Reads either form back; a CSV picks up its hash from the sidecar if present.
ConvergenceReport read_report(const std::filesystem::path& path);

}  // namespace mflab::harness
