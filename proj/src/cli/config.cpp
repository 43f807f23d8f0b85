#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ouhyper/cli.hpp"
#include "ouhyper/error.hpp"

namespace ouhyper::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const KeyInfo* find_key(const std::string& key) {
  for (const auto& info : known_keys()) {
    if (info.key == key) return &info;
  }
  return nullptr;
}

bool is_generator_axis(const std::string& key) { return key.rfind("c.", 0) == 0 && key.size() > 2; }

// Strips a leading "section." when it names the key's own section.
std::string canonical(const std::string& key) {
  if (find_key(key) || is_generator_axis(key)) return key;
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    const std::string section = key.substr(0, dot);
    const std::string rest = key.substr(dot + 1);
    if (const KeyInfo* info = find_key(rest); info && info->section == section) return rest;
    if (section == "scan" && is_generator_axis(rest)) return rest;
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

double to_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "': '" + text + "' is not a number");
}

}  // namespace

const std::vector<KeyInfo>& known_keys() {
  static const std::vector<KeyInfo> keys{
      {"seed", "run", false, "RNG seed, decimal or 0x hex (default 0x5EED)"},
      {"threads", "run", false, "worker threads (0 = all cores, capped by OU_HYPER_THREADS)"},
      {"dim", "run", false, "dimension of the test functions (1..3)"},
      {"output", "output", false, "report path (stdout when empty)"},
      {"format", "output", false, "json, csv or table"},
      {"inner_order", "quadrature", false, "nodes per axis for the inner integral of Q_t"},
      {"outer_order", "quadrature", false, "nodes per axis for norms"},
      {"integration_tol", "tolerance", false, "relative tolerance of u and H integrals"},
      {"inversion_tol", "tolerance", false, "tolerance added to every slack"},
      {"slack_factor", "tolerance", false, "slack multiplier on the error estimate"},
      {"slack_floor", "tolerance", false, "relative slack floor"},
      {"inequality", "check", false, "inequality name"},
      {"f", "check", true, "test function spec family:k=v,..."},
      {"c", "check", false, "generator spec family:k=v,..."},
      {"p", "check", false, "Lebesgue exponent of hc"},
      {"t", "check", false, "semigroup time"},
      {"alpha", "check", false, "exponent of rhc"},
      {"s", "check", false, "outer time of the sandwich chain"},
      {"b", "check", false, "loglog offset of the integrability check"},
      {"q_scale", "check", false, "diagnostic multiplier of the hc target exponent"},
      {"condition", "check", false, "auto, C or Cprime"},
      {"condition_override", "check", false, "run generalized checks even when the condition fails"},
      {"grid", "check", false, "condition grid xmin:xmax:n[:log|lin]"},
      {"t_grid", "scan", false, "comma-separated times"},
      {"p_grid", "scan", false, "comma-separated exponents p"},
      {"alpha_grid", "scan", false, "comma-separated exponents alpha"},
      {"s_grid", "scan", false, "comma-separated sandwich times s"},
      {"corpus_filter", "scan", false, "keep only function specs containing this text"},
      {"search", "scan", false, "counterexample search budget (0 = plain scan)"},
      {"paths", "mc", false, "Monte Carlo paths"},
      {"tau_grid", "mc", false, "martingale times in (0, 1] for the generalized curve"},
      {"input", "report", false, "stored JSON report to render"},
  };
  return keys;
}

bool RunConfig::has(const std::string& key) const {
  const auto it = values.find(key);
  return it != values.end() && !it->second.empty();
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? values.at(key).back() : fallback;
}

double RunConfig::real(const std::string& key, double fallback) const {
  return has(key) ? to_real(key, values.at(key).back()) : fallback;
}

int RunConfig::integer(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const double v = real(key, fallback);
  if (v != static_cast<double>(static_cast<long long>(v))) throw ConfigError("key '" + key + "' must be an integer");
  return static_cast<int>(v);
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = values.at(key).back();
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "' must be true or false");
}

std::uint64_t RunConfig::seed() const { return has("seed") ? parse_seed(text("seed", "")) : kDefaultSeed; }

std::vector<double> RunConfig::reals(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  std::stringstream in(values.at(key).back());
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_real(key, item));
  }
  if (out.empty()) throw ConfigError("key '" + key + "' is an empty list");
  return out;
}

std::vector<std::string> RunConfig::all(const std::string& key) const {
  const auto it = values.find(key);
  return it == values.end() ? std::vector<std::string>{} : it->second;
}

void RunConfig::set(const std::string& key, const std::string& value, bool append) {
  const std::string k = canonical(trim(key));
  auto& slot = values[k];
  const KeyInfo* info = find_key(k);
  if (append && info && info->repeatable) {
    slot.push_back(trim(value));
  } else {
    slot.assign(1, trim(value));
  }
}

void load_config_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::string line;
  std::string section;
  int lineno = 0;
  // Repeatable keys from the file replace earlier values once, then append.
  std::map<std::string, bool> started;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      const bool known = std::any_of(known_keys().begin(), known_keys().end(),
                                     [&](const KeyInfo& k) { return k.section == section; });
      if (!known) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where + "key '" + key + "' outside any section");
    if (is_generator_axis(key)) {
      if (section != "scan") throw ConfigError(where + "generator axes belong to [scan]");
    } else {
      const KeyInfo* info = find_key(key);
      if (!info) throw ConfigError(where + "unknown key '" + key + "'");
      if (info->section != section) {
        throw ConfigError(where + "key '" + key + "' belongs to section [" + info->section + "]");
      }
    }
    try {
      const bool append = started[key];
      config.set(key, value, append);
      started[key] = true;
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

std::uint64_t parse_seed(const std::string& text) {
  const std::string t = trim(text);
  try {
    std::size_t used = 0;
    if (!t.empty() && t.front() != '-') {
      const unsigned long long v = std::stoull(t, &used, 0);
      if (used == t.size()) return static_cast<std::uint64_t>(v);
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("seed '" + text + "' is not a 64-bit unsigned integer");
}

}  // namespace ouhyper::cli
