#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ouhyper/error.hpp"
#include "ouhyper/functions.hpp"

namespace ouhyper {

std::string condition_name(Condition c) { return c == Condition::C ? "C" : "C_prime"; }

GridSpec parse_grid_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream in(spec);
  std::string item;
  while (std::getline(in, item, ':')) parts.push_back(item);
  if (parts.size() < 3 || parts.size() > 4) {
    throw ConfigError("grid spec must be x_min:x_max:n[:log|lin], got '" + spec + "'");
  }
  GridSpec grid;
  try {
    grid.x_min = std::stod(parts[0]);
    grid.x_max = std::stod(parts[1]);
    grid.n_points = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw ConfigError("grid spec has a non-numeric field: '" + spec + "'");
  }
  if (parts.size() == 4) {
    if (parts[3] == "log") grid.log_spaced = true;
    else if (parts[3] == "lin") grid.log_spaced = false;
    else throw ConfigError("grid spacing must be 'log' or 'lin', got '" + parts[3] + "'");
  }
  return grid;
}

std::vector<double> make_grid(const GridSpec& grid) {
  if (!(grid.x_min > 0.0) || !(grid.x_max > grid.x_min)) {
    throw ConfigError("condition grid needs 0 < x_min < x_max");
  }
  if (grid.n_points < 16) throw ConfigError("condition grid needs at least 16 points");
  std::vector<double> xs(grid.n_points);
  const int last = grid.n_points - 1;
  for (int i = 0; i <= last; ++i) {
    const double s = static_cast<double>(i) / last;
    xs[i] = grid.log_spaced ? std::exp(std::log(grid.x_min) + s * (std::log(grid.x_max) - std::log(grid.x_min)))
                            : grid.x_min + s * (grid.x_max - grid.x_min);
  }
  xs.front() = grid.x_min;
  xs.back() = grid.x_max;
  return xs;
}

namespace {

constexpr double kCurvatureTol = 1e-9;

// Chord deviation at the middle point: positive for convex bending.
double chord_deviation(double x0, double x1, double x2, double r0, double r1, double r2) {
  return ((x2 - x1) * r0 + (x1 - x0) * r2) / (x2 - x0) - r1;
}

ConditionReport check_shape(const GeneratorC& c, const GridSpec& grid, Condition which) {
  ConditionReport report;
  report.condition = which;
  report.grid = make_grid(grid);
  const auto& xs = report.grid;
  const int sign = which == Condition::C ? +1 : -1;

  std::vector<double> r(xs.size());
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dlog = c.dlog_c(xs[i]);
    const double logc = c.log_c(xs[i]);
    if (!std::isfinite(dlog) || std::isnan(logc)) {
      std::ostringstream msg;
      msg << c.label() << ": c or c' not finite at x = " << xs[i];
      throw EvaluationError(msg.str());
    }
    // c > 0, so sign(c') = sign(c'/c). c' = 0 counts as a violation.
    const double signed_slope = sign * dlog;
    min_margin = std::min(min_margin, signed_slope);
    if (!(signed_slope > 0.0)) {
      report.violations.push_back({xs[i], dlog, which == Condition::C ? "c' <= 0" : "c' >= 0"});
    }
    r[i] = dlog != 0.0 ? 1.0 / dlog : std::numeric_limits<double>::infinity();
  }

  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    if (!std::isfinite(r[i - 1]) || !std::isfinite(r[i]) || !std::isfinite(r[i + 1])) continue;
    const double dev = chord_deviation(xs[i - 1], xs[i], xs[i + 1], r[i - 1], r[i], r[i + 1]);
    const double tol = kCurvatureTol * std::max(1.0, std::abs(r[i]));
    // (C): concave, so the chord lies below r; (C'): convex, chord above.
    const double bend = sign * dev;
    min_margin = std::min(min_margin, tol - bend);
    if (bend > tol) {
      report.violations.push_back(
          {xs[i], dev, which == Condition::C ? "c/c' not concave" : "c/c' not convex"});
    }
  }

  if (which == Condition::CPrime) {
    for (double x : {grid.x_min, 0.5 * grid.x_min}) {
      const double v = c.c(x);
      if (!std::isfinite(v)) {
        report.violations.push_back({x, v, "c not finite near 0"});
        min_margin = -std::numeric_limits<double>::infinity();
      }
    }
  }

  report.min_margin = min_margin;
  report.passed = report.violations.empty();
  std::ostringstream summary;
  summary << "condition " << condition_name(which) << " for " << c.label() << ": ";
  if (report.passed) {
    summary << "not falsified on grid [" << grid.x_min << ", " << grid.x_max << "] (" << xs.size()
            << (grid.log_spaced ? " log-spaced" : " linear") << " points)";
  } else {
    summary << report.violations.size() << " violation(s), first at x = " << report.violations.front().x
            << " (" << report.violations.front().reason << ")";
  }
  report.summary = summary.str();
  return report;
}

}  // namespace

ConditionReport check_condition_C(const GeneratorC& c, const GridSpec& grid) {
  return check_shape(c, grid, Condition::C);
}

ConditionReport check_condition_Cprime(const GeneratorC& c, const GridSpec& grid) {
  return check_shape(c, grid, Condition::CPrime);
}

}  // namespace ouhyper
