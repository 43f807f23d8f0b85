#include "ouhyper/scan.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ouhyper/error.hpp"
#include "ouhyper/parallel.hpp"

namespace ouhyper {

namespace {

bool uses_generator(const std::string& ineq) { return needs_generator(ineq); }

struct Axis {
  std::string name;
  std::vector<double> values;
};

std::vector<Axis> axes_for(const ScanSpec& spec) {
  std::vector<Axis> axes;
  if (uses_generator(spec.inequality)) {
    for (const auto& [key, values] : spec.generator_axes) axes.push_back({"c." + key, values});
  }
  const std::string& q = spec.inequality;
  if (q == "hc") {
    axes.push_back({"p", spec.p_grid});
    axes.push_back({"t", spec.t_grid});
  } else if (q == "rhc") {
    axes.push_back({"alpha", spec.alpha_grid});
    axes.push_back({"t", spec.t_grid});
  } else if (q == "sandwich") {
    axes.push_back({"s", spec.s_grid});
    axes.push_back({"t", spec.t_grid});
  } else if (q != "lsi" && q != "glsi") {
    axes.push_back({"t", spec.t_grid});
  }
  return axes;
}

std::vector<ScanRow> error_row(const ScanSpec& spec, std::size_t f_index, const std::string& f_spec,
                               const std::map<std::string, double>& coords, const std::string& kind,
                               const std::string& what) {
  ScanRow row;
  row.f_index = f_index;
  row.f_spec = f_spec;
  row.coords = coords;
  row.error = what;
  row.error_kind = kind;
  row.verdict.name = spec.inequality;
  row.verdict.lhs = row.verdict.rhs = row.verdict.margin = std::nan("");
  row.verdict.holds = false;
  return {row};
}

double coord(const std::map<std::string, double>& coords, const char* key) {
  const auto it = coords.find(key);
  if (it == coords.end()) throw ConfigError(std::string("scan cell is missing axis ") + key);
  return it->second;
}

std::uint64_t next_bits(std::mt19937_64& rng) { return rng(); }

double unit(std::mt19937_64& rng) { return static_cast<double>(next_bits(rng) >> 11) * 0x1p-53; }

bool is_violation(const ScanRow& row) {
  if (!row.error.empty()) return false;
  const Verdict& v = row.verdict;
  const double deficit = -v.margin;
  return std::isfinite(deficit) && deficit > v.slack && deficit > 10.0 * v.error_estimate;
}

double score(const ScanRow& row) {
  if (!row.error.empty() || !std::isfinite(row.verdict.margin)) return -1e300;
  return -row.verdict.margin / row.verdict.slack;
}

}  // namespace

std::size_t ScanResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ScanRow& r) { return !r.verdict.holds; }));
}

std::size_t ScanResult::errors() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ScanRow& r) { return !r.error.empty(); }));
}

std::vector<std::string> filtered_corpus(const ScanSpec& spec) {
  std::vector<std::string> out;
  for (const auto& s : spec.corpus) {
    if (spec.corpus_filter.empty() || s.find(spec.corpus_filter) != std::string::npos) out.push_back(s);
  }
  return out;
}

void validate_scan_spec(const ScanSpec& spec) {
  const auto& names = inequality_names();
  if (std::find(names.begin(), names.end(), spec.inequality) == names.end() || spec.inequality == "equiv") {
    throw ConfigError("scan: unknown inequality '" + spec.inequality + "'");
  }
  if (filtered_corpus(spec).empty()) throw ConfigError("scan: corpus is empty after filtering");
  if (uses_generator(spec.inequality)) {
    if (spec.generator_family.empty()) throw ConfigError("scan: " + spec.inequality + " needs a generator family");
    // Builds a generator at the first grid point to validate names and domains.
    ParamMap first;
    for (const auto& [key, values] : spec.generator_axes) {
      if (values.empty()) throw ConfigError("scan: generator axis " + key + " is empty");
      first[key] = values.front();
    }
    (void)builtin_c(spec.generator_family, first);
    for (const auto& [key, values] : spec.generator_axes) {
      for (double v : values) {
        ParamMap probe = first;
        probe[key] = v;
        (void)builtin_c(spec.generator_family, probe);
      }
    }
  }
  for (const Axis& axis : axes_for(spec)) {
    if (axis.values.empty()) throw ConfigError("scan: axis " + axis.name + " is empty");
  }
  if (spec.inequality == "sandwich") {
    for (double frac : spec.t_grid) {
      if (!(frac >= 0.0 && frac < 1.0)) throw ConfigError("scan: sandwich t values are fractions of s in [0, 1)");
    }
  }
  if (spec.dim < 1 || spec.dim > kMaxDim) throw ConfigError("scan: dim must be in 1..3");
}

std::vector<ScanRow> evaluate_cell(const ScanSpec& spec, std::size_t f_index,
                                   const std::map<std::string, double>& coords) {
  const auto corpus = filtered_corpus(spec);
  if (f_index >= corpus.size()) throw ConfigError("scan: function index out of range");
  const std::string& f_spec = corpus[f_index];
  try {
    const TestFunction f = function_from_spec(f_spec, spec.dim);
    std::optional<GeneratorC> c;
    std::string c_spec;
    if (uses_generator(spec.inequality)) {
      ParamMap params;
      for (const auto& [key, value] : coords) {
        if (key.rfind("c.", 0) == 0) params[key.substr(2)] = value;
      }
      c = builtin_c(spec.generator_family, params);
      c_spec = c->label();
    }
    CheckParams params;
    params.b = spec.b;
    params.q_scale = spec.q_scale;
    if (coords.count("p")) params.p = coords.at("p");
    if (coords.count("alpha")) params.alpha = coords.at("alpha");
    if (coords.count("s")) params.s = coords.at("s");
    if (coords.count("t")) params.t = coords.at("t");
    if (spec.inequality == "sandwich") params.t = coord(coords, "t") * params.s;
    std::vector<Verdict> verdicts = run_named_check(spec.inequality, f, c ? &*c : nullptr, params, spec.numeric);
    std::vector<ScanRow> rows;
    for (auto& v : verdicts) {
      ScanRow row;
      row.f_index = f_index;
      row.f_spec = f_spec;
      row.c_spec = c_spec;
      row.coords = coords;
      row.verdict = std::move(v);
      rows.push_back(std::move(row));
    }
    return rows;
  } catch (const ConfigError& e) {
    return error_row(spec, f_index, f_spec, coords, "config", e.what());
  } catch (const PreconditionError& e) {
    return error_row(spec, f_index, f_spec, coords, "precondition", e.what());
  } catch (const RangeError& e) {
    return error_row(spec, f_index, f_spec, coords, "range", e.what());
  } catch (const EvaluationError& e) {
    return error_row(spec, f_index, f_spec, coords, "evaluation", e.what());
  } catch (const ConvergenceError& e) {
    return error_row(spec, f_index, f_spec, coords, "convergence", e.what());
  }
}

namespace {

struct Cell {
  std::size_t f_index;
  std::map<std::string, double> coords;
};

std::vector<Cell> grid_cells(const ScanSpec& spec) {
  const auto axes = axes_for(spec);
  const std::size_t n_f = filtered_corpus(spec).size();
  std::size_t per_f = 1;
  for (const Axis& a : axes) per_f *= a.values.size();
  std::vector<Cell> cells;
  cells.reserve(n_f * per_f);
  for (std::size_t fi = 0; fi < n_f; ++fi) {
    for (std::size_t flat = 0; flat < per_f; ++flat) {
      Cell cell{fi, {}};
      // Mixed radix with the last axis varying fastest.
      std::size_t rest = flat;
      for (std::size_t k = axes.size(); k-- > 0;) {
        const std::size_t n = axes[k].values.size();
        cell.coords[axes[k].name] = axes[k].values[rest % n];
        rest /= n;
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::vector<ScanRow> evaluate_cells(const ScanSpec& spec, const std::vector<Cell>& cells) {
  std::vector<std::vector<ScanRow>> slots(cells.size());
  parallel_for(cells.size(), worker_count(spec.threads),
               [&](std::size_t i) { slots[i] = evaluate_cell(spec, cells[i].f_index, cells[i].coords); });
  std::vector<ScanRow> rows;
  for (auto& slot : slots) {
    for (auto& row : slot) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ScanResult run_scan(const ScanSpec& spec) {
  validate_scan_spec(spec);
  ScanResult result;
  result.spec = spec;
  result.rows = evaluate_cells(spec, grid_cells(spec));
  return result;
}

CounterexampleResult search_counterexample(const ScanSpec& spec, std::size_t budget) {
  if (budget < 1) throw ConfigError("search: budget must be >= 1");
  validate_scan_spec(spec);
  CounterexampleResult out;
  const ScanRow* best_row = nullptr;
  std::vector<ScanRow> kept;
  kept.reserve(3);

  auto consider = [&](std::vector<ScanRow> rows) {
    for (auto& row : rows) {
      const double s = score(row);
      if (s > out.best_score) {
        out.best_score = s;
        kept.assign(1, std::move(row));
        best_row = &kept.front();
      }
    }
  };

  // Grid phase.
  auto cells = grid_cells(spec);
  if (cells.size() > budget) cells.resize(budget);
  consider(evaluate_cells(spec, cells));
  out.evaluations = cells.size();

  // Bounding box of every axis.
  const auto axes = axes_for(spec);
  std::map<std::string, std::pair<double, double>> box;
  for (const Axis& a : axes) {
    const auto [lo, hi] = std::minmax_element(a.values.begin(), a.values.end());
    box[a.name] = {*lo, *hi};
  }
  const std::size_t n_f = filtered_corpus(spec).size();
  std::mt19937_64 rng(spec.seed);

  const std::size_t remaining = budget - out.evaluations;
  const std::size_t random_budget = remaining / 2;
  const std::size_t batch = 64;

  auto run_batch = [&](std::vector<Cell> batch_cells) {
    consider(evaluate_cells(spec, batch_cells));
    out.evaluations += batch_cells.size();
  };

  // Random phase.
  for (std::size_t done = 0; done < random_budget;) {
    std::vector<Cell> batch_cells;
    for (; batch_cells.size() < batch && done < random_budget; ++done) {
      Cell cell{static_cast<std::size_t>(next_bits(rng) % n_f), {}};
      for (const auto& [name, range] : box) cell.coords[name] = range.first + unit(rng) * (range.second - range.first);
      batch_cells.push_back(std::move(cell));
    }
    run_batch(std::move(batch_cells));
  }

  // Refinement around the current worst cell with a shrinking radius.
  const bool can_move = std::any_of(box.begin(), box.end(), [](const auto& kv) {
    return kv.second.second > kv.second.first;
  });
  double radius = 0.25;
  while (can_move && out.evaluations < budget && best_row) {
    const Cell centre{best_row->f_index, best_row->coords};
    std::vector<Cell> batch_cells;
    while (batch_cells.size() < batch && out.evaluations + batch_cells.size() < budget) {
      Cell cell = centre;
      for (const auto& [name, range] : box) {
        const double width = range.second - range.first;
        if (width <= 0.0) continue;
        const double v = cell.coords[name] + (2.0 * unit(rng) - 1.0) * radius * width;
        cell.coords[name] = std::clamp(v, range.first, range.second);
      }
      batch_cells.push_back(std::move(cell));
    }
    run_batch(std::move(batch_cells));
    radius = std::max(radius * 0.5, 1e-6);
  }

  if (best_row && is_violation(*best_row)) out.violation = *best_row;
  return out;
}

}  // namespace ouhyper
