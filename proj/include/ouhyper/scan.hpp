#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ouhyper/inequalities.hpp"
#include "ouhyper/mc_sim.hpp"

namespace ouhyper {

/// A sweep of one inequality over a Cartesian grid.
///
/// Axes used per inequality:
///   hc: p, t          ehc, ctmain: t         rhc: alpha, t
///   genhc, genrhc, integrability: generator params, t
///   glsi: generator params                 lsi: none
///   sandwich: s, and t_grid read as fractions of s in [0, 1)
/// Generator axes are keyed by the family's parameter names.
struct ScanSpec {
  std::string inequality;
  std::string generator_family;
  std::map<std::string, std::vector<double>> generator_axes;
  std::vector<std::string> corpus;  // function specs "family:k=v,..."
  std::string corpus_filter;        // keep specs containing this text; empty keeps all
  int dim = 1;
  std::vector<double> t_grid{0.5};
  std::vector<double> p_grid{2.0};
  std::vector<double> alpha_grid{1.0};
  std::vector<double> s_grid{1.0};
  double b = 2.0;
  double q_scale = 1.0;  // hc only; != 1 is the diagnostic mode
  NumericOptions numeric;
  int threads = 0;
  std::uint64_t seed = kDefaultSeed;
};

/// One evaluated cell. Cell-level failures keep their place in the table:
/// error holds the message and the verdict is marked as not holding.
struct ScanRow {
  std::size_t f_index = 0;
  std::string f_spec;
  std::string c_spec;
  std::map<std::string, double> coords;
  Verdict verdict;
  std::string error;
  std::string error_kind;  // config, precondition, range, evaluation, convergence
};

struct ScanResult {
  ScanSpec spec;
  std::vector<ScanRow> rows;

  std::size_t failures() const;  // rows that do not hold, errors included
  std::size_t errors() const;
};

/// Throws ConfigError when the spec is invalid (unknown inequality, empty
/// grids or corpus after filtering, generator missing where required).
void validate_scan_spec(const ScanSpec& spec);

/// Corpus after applying the filter, in input order.
std::vector<std::string> filtered_corpus(const ScanSpec& spec);

/// Evaluates every cell. Rows come out in grid order (function, generator
/// params, then inequality axes) whatever the thread count.
ScanResult run_scan(const ScanSpec& spec);

/// Evaluates one cell given all its coordinates. Generator parameters are
/// passed with a "c." prefix.
std::vector<ScanRow> evaluate_cell(const ScanSpec& spec, std::size_t f_index,
                                   const std::map<std::string, double>& coords);

struct CounterexampleResult {
  std::optional<ScanRow> violation;
  double best_score = -1e300;  // -margin / slack of the most violating cell
  std::size_t evaluations = 0;
  std::string label = "exploratory";
};

/// Grid pass, then random draws inside the grid's bounding box, then local
/// refinement around the worst cell, all within `budget` evaluations.
/// A cell counts as a violation only when -margin exceeds both its slack
/// and 10 times its error estimate.
CounterexampleResult search_counterexample(const ScanSpec& spec, std::size_t budget);

}  // namespace ouhyper
