#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "ouhyper/functions.hpp"
#include "ouhyper/inequalities.hpp"
#include "ouhyper/mc_sim.hpp"
#include "ouhyper/scan.hpp"

namespace ouhyper {

inline constexpr int kReportVersion = 1;

/// Fixed CSV header, one verdict per row.
inline constexpr const char* kCsvHeader = "name,lhs,rhs,margin,slack,holds,error_estimate,params";

/// A command's result: the JSON report is
///   {version, command, inputs, verdicts: [...], timing, ...details}
/// with object keys in sorted order.
struct Report {
  std::string command;
  nlohmann::json inputs = nlohmann::json::object();
  std::vector<Verdict> verdicts;
  /// Extra sections (condition reports, moment tables, curves, scan rows).
  nlohmann::json details = nlohmann::json::object();
  double timing_seconds = 0.0;
};

nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const ConditionReport& r);
nlohmann::json to_json(const IdentityReport& r);
nlohmann::json to_json(const McCurve& c);
nlohmann::json to_json(const GenhcCurve& c);
nlohmann::json to_json(const ScanRow& row);
nlohmann::json to_json(const CounterexampleResult& r);

/// Report -> JSON document text (2-space indent, trailing newline).
std::string render_json(const Report& report);

/// Report -> CSV text with kCsvHeader. params is "key=value;..." built from
/// the verdict inputs; fields holding commas or quotes are quoted.
std::string render_csv(const std::vector<Verdict>& verdicts);

/// Verdicts stored in a JSON report (only the schema fields are read).
std::vector<Verdict> verdicts_from_json(const nlohmann::json& doc);

/// Short human-readable table of verdicts.
std::string render_table(const std::vector<Verdict>& verdicts);

/// Writes content to path through a temporary file in the same directory
/// followed by a rename. Throws Error on I/O failure.
void write_atomic(const std::string& path, const std::string& content);

/// Verdicts of a scan, each carrying its cell coordinates and any error in
/// its inputs so that CSV rows are self-describing.
std::vector<Verdict> scan_verdicts(const ScanResult& result);

}  // namespace ouhyper
