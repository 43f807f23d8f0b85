#include "ouhyper/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "ouhyper/error.hpp"

namespace ouhyper {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json& j) { return j.is_number() ? j.get<double>() : std::nan(""); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string params_field(const Verdict& v) {
  std::string out;
  for (const auto& [key, value] : v.inputs) {
    if (!out.empty()) out += ';';
    out += key + "=" + value;
  }
  return out;
}

}  // namespace

json to_json(const Verdict& v) {
  json j;
  j["name"] = v.name;
  j["direction"] = v.direction == Direction::LessEq ? "<=" : ">=";
  j["lhs"] = number(v.lhs);
  j["rhs"] = number(v.rhs);
  j["margin"] = number(v.margin);
  j["slack"] = number(v.slack);
  j["holds"] = v.holds;
  j["error_estimate"] = number(v.error_estimate);
  j["inputs"] = v.inputs;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

json to_json(const ConditionReport& r) {
  json j;
  j["condition"] = condition_name(r.condition);
  j["passed"] = r.passed;
  j["summary"] = r.summary;
  j["min_margin"] = number(r.min_margin);
  j["grid_points"] = r.grid.size();
  if (!r.grid.empty()) j["grid_range"] = {r.grid.front(), r.grid.back()};
  json violations = json::array();
  for (const auto& v : r.violations) {
    violations.push_back({{"x", number(v.x)}, {"diagnostic", number(v.diagnostic)}, {"reason", v.reason}});
  }
  j["violations"] = violations;
  return j;
}

json to_json(const IdentityReport& r) {
  json j;
  j["t"] = r.t;
  j["tau"] = r.tau;
  j["f"] = r.f_label;
  j["passed"] = r.passed;
  json rows = json::array();
  for (const auto& m : r.moments) {
    rows.push_back({{"k", m.k},
                    {"quadrature", number(m.quadrature)},
                    {"monte_carlo", number(m.monte_carlo)},
                    {"standard_error", number(m.standard_error)},
                    {"z", number(m.z)},
                    {"passed", m.passed}});
  }
  j["moments"] = rows;
  return j;
}

json to_json(const McCurve& c) {
  json j;
  json pts = json::array();
  for (const auto& p : c.points) {
    pts.push_back({{"tau", p.tau},
                   {"mean_u", number(p.mean_u)},
                   {"standard_error", number(p.standard_error)},
                   {"value", number(p.value)},
                   {"lo", number(p.lo)},
                   {"hi", number(p.hi)}});
  }
  j["points"] = pts;
  j["chain_holds"] = c.chain_holds;
  j["quadrature_endpoint"] = number(c.quadrature_endpoint);
  j["endpoint_matches"] = c.endpoint_matches;
  return j;
}

json to_json(const GenhcCurve& c) {
  json j;
  json pts = json::array();
  for (const auto& p : c.points) pts.push_back({{"t", p.t}, {"value", number(p.value)}, {"slack", number(p.slack)}});
  j["points"] = pts;
  j["max_upward_jump"] = number(c.max_upward_jump);
  j["nonincreasing"] = c.nonincreasing;
  return j;
}

json to_json(const ScanRow& row) {
  json j;
  j["f"] = row.f_spec;
  if (!row.c_spec.empty()) j["c"] = row.c_spec;
  j["coords"] = row.coords;
  j["verdict"] = to_json(row.verdict);
  if (!row.error.empty()) j["error"] = {{"kind", row.error_kind}, {"message", row.error}};
  return j;
}

json to_json(const CounterexampleResult& r) {
  json j;
  j["label"] = r.label;
  j["evaluations"] = r.evaluations;
  j["best_score"] = number(r.best_score);
  j["violation"] = r.violation ? to_json(*r.violation) : json(nullptr);
  return j;
}

std::string render_json(const Report& report) {
  json j = report.details;
  j["version"] = kReportVersion;
  j["command"] = report.command;
  j["inputs"] = report.inputs;
  json verdicts = json::array();
  for (const auto& v : report.verdicts) verdicts.push_back(to_json(v));
  j["verdicts"] = verdicts;
  j["timing"] = {{"seconds", report.timing_seconds}};
  return j.dump(2) + "\n";
}

std::string render_csv(const std::vector<Verdict>& verdicts) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const auto& v : verdicts) {
    out << csv_field(v.name) << ',' << format_double(v.lhs) << ',' << format_double(v.rhs) << ','
        << format_double(v.margin) << ',' << format_double(v.slack) << ',' << (v.holds ? "true" : "false") << ','
        << format_double(v.error_estimate) << ',' << csv_field(params_field(v)) << "\n";
  }
  return out.str();
}

std::vector<Verdict> verdicts_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("verdicts") || !doc["verdicts"].is_array()) {
    throw ConfigError("report has no verdicts array");
  }
  std::vector<Verdict> out;
  for (const auto& j : doc["verdicts"]) {
    Verdict v;
    v.name = j.value("name", "");
    v.direction = j.value("direction", "<=") == ">=" ? Direction::GreaterEq : Direction::LessEq;
    v.lhs = read_number(j.value("lhs", json(nullptr)));
    v.rhs = read_number(j.value("rhs", json(nullptr)));
    v.margin = read_number(j.value("margin", json(nullptr)));
    v.slack = read_number(j.value("slack", json(nullptr)));
    v.holds = j.value("holds", false);
    v.error_estimate = read_number(j.value("error_estimate", json(nullptr)));
    if (j.contains("inputs") && j["inputs"].is_object()) {
      for (const auto& [key, value] : j["inputs"].items()) {
        v.inputs[key] = value.is_string() ? value.get<std::string>() : value.dump();
      }
    }
    v.note = j.value("note", "");
    out.push_back(std::move(v));
  }
  return out;
}

std::string render_table(const std::vector<Verdict>& verdicts) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %-3s %14s %14s %12s %10s %s\n", "name", "dir", "lhs", "rhs", "margin",
                "slack", "holds");
  out << line;
  for (const auto& v : verdicts) {
    std::snprintf(line, sizeof line, "%-16s %-3s %14.8g %14.8g %12.4g %10.3g %s\n", v.name.c_str(),
                  v.direction == Direction::LessEq ? "<=" : ">=", v.lhs, v.rhs, v.margin, v.slack,
                  v.holds ? "yes" : "NO");
    out << line;
  }
  return out.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move report into place at " + path);
  }
}

std::vector<Verdict> scan_verdicts(const ScanResult& result) {
  std::vector<Verdict> out;
  out.reserve(result.rows.size());
  for (const auto& row : result.rows) {
    Verdict v = row.verdict;
    v.inputs["f"] = row.f_spec;
    if (!row.c_spec.empty()) v.inputs["c"] = row.c_spec;
    for (const auto& [key, value] : row.coords) v.inputs[key] = format_double(value);
    if (!row.error.empty()) v.inputs["error"] = row.error_kind + ": " + row.error;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace ouhyper
