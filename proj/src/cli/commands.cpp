#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ouhyper/cli.hpp"
#include "ouhyper/error.hpp"
#include "ouhyper/mc_sim.hpp"
#include "ouhyper/ou_operator.hpp"
#include "ouhyper/scan.hpp"

namespace ouhyper::cli {

using nlohmann::json;

namespace {

NumericOptions numeric_options(const RunConfig& cfg) {
  NumericOptions opts;
  opts.inner_order = cfg.integer("inner_order", 0);
  opts.outer_order = cfg.integer("outer_order", 0);
  opts.integration_tol = cfg.real("integration_tol", opts.integration_tol);
  opts.inversion_tol = cfg.real("inversion_tol", opts.inversion_tol);
  opts.slack_factor = cfg.real("slack_factor", opts.slack_factor);
  opts.slack_floor = cfg.real("slack_floor", opts.slack_floor);
  opts.enforce_conditions = !cfg.flag("condition_override", false);
  if (cfg.has("grid")) opts.condition_grid = parse_grid_spec(cfg.text("grid", ""));
  if (!(opts.integration_tol > 0.0) || !(opts.inversion_tol >= 0.0) || !(opts.slack_factor >= 0.0) ||
      !(opts.slack_floor >= 0.0)) {
    throw ConfigError("tolerances must be positive");
  }
  return opts;
}

CheckParams check_params(const RunConfig& cfg) {
  CheckParams p;
  p.p = cfg.real("p", p.p);
  p.t = cfg.real("t", p.t);
  p.alpha = cfg.real("alpha", p.alpha);
  p.s = cfg.real("s", p.s);
  p.b = cfg.real("b", p.b);
  p.q_scale = cfg.real("q_scale", p.q_scale);
  return p;
}

std::vector<std::string> corpus(const RunConfig& cfg) {
  auto fs = cfg.all("f");
  return fs.empty() ? default_corpus() : fs;
}

// Everything that determines the result, so a report can be replayed.
json echo_inputs(const RunConfig& cfg) {
  json in;
  json settings = json::object();
  for (const auto& [key, values] : cfg.values) {
    if (key == "output" || values.empty()) continue;
    const KeyInfo* info = nullptr;
    for (const auto& k : known_keys()) {
      if (k.key == key) info = &k;
    }
    if (info && info->repeatable) settings[key] = values;
    else settings[key] = values.back();
  }
  in["settings"] = settings;
  in["seed"] = cfg.seed();
  const int dim = cfg.integer("dim", 1);
  const NumericOptions opts = numeric_options(cfg);
  in["dim"] = dim;
  in["quadrature"] = {{"inner_order", opts.inner_order > 0 ? opts.inner_order : default_order(dim)},
                      {"outer_order", opts.outer_order > 0 ? opts.outer_order : default_order(dim)}};
  in["tolerances"] = {{"integration_tol", opts.integration_tol},
                      {"inversion_tol", opts.inversion_tol},
                      {"slack_factor", opts.slack_factor},
                      {"slack_floor", opts.slack_floor}};
  in["condition_grid"] = {{"xmin", opts.condition_grid.x_min},
                          {"xmax", opts.condition_grid.x_max},
                          {"n", opts.condition_grid.n_points},
                          {"log", opts.condition_grid.log_spaced}};
  return in;
}

bool all_hold(const std::vector<Verdict>& verdicts) {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.holds; });
}

Verdict status_verdict(std::string name, Direction dir, double lhs, double rhs, double slack, bool holds) {
  Verdict v;
  v.name = std::move(name);
  v.direction = dir;
  v.lhs = lhs;
  v.rhs = rhs;
  v.margin = dir == Direction::LessEq ? rhs - lhs : lhs - rhs;
  v.slack = slack;
  v.holds = holds;
  return v;
}

Report cmd_verify(const RunConfig& cfg) {
  Report report;
  const std::string name = cfg.text("inequality", "hc");
  const auto& names = inequality_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigError("unknown inequality '" + name + "'");
  }
  const int dim = cfg.integer("dim", 1);
  const NumericOptions opts = numeric_options(cfg);
  const CheckParams params = check_params(cfg);
  std::optional<GeneratorC> c;
  if (cfg.has("c")) c = generator_from_spec(cfg.text("c", ""));
  if (needs_generator(name) && !c) throw ConfigError(name + " needs --c");
  if (!needs_generator(name) && c) throw ConfigError(name + " does not take --c");

  json curves = json::array();
  for (const auto& spec : corpus(cfg)) {
    const TestFunction f = function_from_spec(spec, dim);
    for (auto& v : run_named_check(name, f, c ? &*c : nullptr, params, opts)) report.verdicts.push_back(v);
    if (name == "genhc" && cfg.has("t_grid")) {
      const GenhcCurve curve = curve_genhc(*c, f, cfg.reals("t_grid", {}), opts);
      double slack = 0.0;
      for (const auto& p : curve.points) slack = std::max(slack, p.slack);
      Verdict mono = status_verdict("genhc_monotone", Direction::LessEq, curve.max_upward_jump, 0.0, slack,
                                    curve.nonincreasing);
      mono.inputs = {{"c", c->label()}, {"f", f.label}};
      report.verdicts.push_back(mono);
      json j = to_json(curve);
      j["f"] = f.label;
      curves.push_back(j);
    }
  }
  if (!curves.empty()) report.details["curves"] = curves;
  return report;
}

ScanSpec scan_spec(const RunConfig& cfg) {
  ScanSpec spec;
  spec.inequality = cfg.text("inequality", "hc");
  spec.corpus = corpus(cfg);
  spec.corpus_filter = cfg.text("corpus_filter", "");
  spec.dim = cfg.integer("dim", 1);
  const CheckParams params = check_params(cfg);
  spec.t_grid = cfg.reals("t_grid", {params.t});
  spec.p_grid = cfg.reals("p_grid", {params.p});
  spec.alpha_grid = cfg.reals("alpha_grid", {params.alpha});
  spec.s_grid = cfg.reals("s_grid", {params.s});
  spec.b = params.b;
  spec.q_scale = params.q_scale;
  spec.numeric = numeric_options(cfg);
  spec.threads = cfg.integer("threads", 0);
  spec.seed = cfg.seed();
  if (cfg.has("c")) {
    // The family comes from --c; its parameters are single-point axes that
    // c.<param> keys may widen.
    const auto [family, fixed] = parse_family_spec(cfg.text("c", ""));
    spec.generator_family = family;
    for (const auto& [key, value] : fixed) spec.generator_axes[key] = {value};
  }
  for (const auto& [key, values] : cfg.values) {
    if (key.rfind("c.", 0) == 0) spec.generator_axes[key.substr(2)] = cfg.reals(key, {});
  }
  if (!spec.generator_axes.empty() && spec.generator_family.empty()) {
    throw ConfigError("generator axes given without --c naming the family");
  }
  return spec;
}

Report cmd_scan(const RunConfig& cfg, int& exit_code) {
  Report report;
  const ScanSpec spec = scan_spec(cfg);
  const int budget = cfg.integer("search", 0);
  if (budget < 0) throw ConfigError("search budget must be >= 0");
  if (budget > 0) {
    const CounterexampleResult found = search_counterexample(spec, static_cast<std::size_t>(budget));
    report.details["search"] = to_json(found);
    if (found.violation) {
      ScanResult one;
      one.rows.push_back(*found.violation);
      report.verdicts = scan_verdicts(one);
    }
    exit_code = found.violation ? kCheckFailed : kPass;
    return report;
  }
  const ScanResult result = run_scan(spec);
  json rows = json::array();
  for (const auto& row : result.rows) rows.push_back(to_json(row));
  report.details["rows"] = rows;
  report.details["summary"] = {
      {"cells", result.rows.size()}, {"failures", result.failures()}, {"errors", result.errors()}};
  report.verdicts = scan_verdicts(result);
  exit_code = all_hold(report.verdicts) ? kPass : kCheckFailed;
  return report;
}

Report cmd_mc_check(const RunConfig& cfg) {
  Report report;
  EnsembleSpec ens;
  ens.dim = cfg.integer("dim", 1);
  ens.seed = cfg.seed();
  ens.threads = cfg.integer("threads", 0);
  const int paths = cfg.integer("paths", 100000);
  if (paths < 2) throw ConfigError("paths must be >= 2");
  ens.n_paths = static_cast<std::size_t>(paths);
  const NumericOptions opts = numeric_options(cfg);
  ens.inner_rule = cached_rule(opts.inner_order > 0 ? opts.inner_order : default_order(ens.dim), ens.dim);
  const auto outer = cached_rule(opts.outer_order > 0 ? opts.outer_order : default_order(ens.dim), ens.dim);
  const auto times = cfg.reals("t_grid", {cfg.real("t", 0.3)});

  json tables = json::array();
  json curves = json::array();
  const std::vector<std::string> fs = cfg.all("f").empty() ? std::vector<std::string>{"exp_linear:lambda=0.5"}
                                                            : cfg.all("f");
  for (const auto& spec : fs) {
    const TestFunction f = function_from_spec(spec, ens.dim);
    for (double t : times) {
      const IdentityReport r = check_identity_in_law(f, t, ens, *outer);
      tables.push_back(to_json(r));
      for (const auto& m : r.moments) {
        const double diff = std::abs(m.quadrature - m.monte_carlo);
        Verdict v = status_verdict("identity_in_law_m" + std::to_string(m.k), Direction::LessEq, diff,
                                   4.0 * m.standard_error, 1e-10 * std::max(1.0, std::abs(m.quadrature)), m.passed);
        v.inputs = {{"f", f.label},
                    {"t", format_double(t)},
                    {"tau", format_double(r.tau)},
                    {"quadrature", format_double(m.quadrature)},
                    {"monte_carlo", format_double(m.monte_carlo)},
                    {"standard_error", format_double(m.standard_error)}};
        report.verdicts.push_back(v);
      }
    }
    if (cfg.has("c")) {
      const GeneratorC c = generator_from_spec(cfg.text("c", ""));
      const McCurve curve = mc_genhc(c, f, cfg.reals("tau_grid", {0.25, 0.5, 0.75, 1.0}), ens, opts);
      double worst = -INFINITY;
      for (std::size_t i = 0; i < curve.points.size(); ++i) {
        for (std::size_t j = i + 1; j < curve.points.size(); ++j) {
          worst = std::max(worst, curve.points[i].lo - curve.points[j].hi);
        }
      }
      if (!std::isfinite(worst)) worst = 0.0;
      Verdict v = status_verdict("mc_genhc_chain", Direction::LessEq, worst, 0.0, 0.0,
                                 curve.chain_holds && curve.endpoint_matches);
      v.inputs = {{"c", c.label()}, {"f", f.label}};
      report.verdicts.push_back(v);
      json j = to_json(curve);
      j["f"] = f.label;
      curves.push_back(j);
    }
  }
  report.details["moments"] = tables;
  if (!curves.empty()) report.details["curves"] = curves;
  return report;
}

Report cmd_conditions(const RunConfig& cfg) {
  Report report;
  if (!cfg.has("c")) throw ConfigError("conditions needs --c");
  const GeneratorC c = generator_from_spec(cfg.text("c", ""));
  const GridSpec grid = cfg.has("grid") ? parse_grid_spec(cfg.text("grid", "")) : GridSpec{};
  std::string which = cfg.text("condition", "auto");
  if (which == "auto") {
    // The sign of c' in the middle of the grid decides which condition applies.
    const auto xs = make_grid(grid);
    which = c.dlog_c(xs[xs.size() / 2]) < 0.0 ? "Cprime" : "C";
  }
  ConditionReport r;
  if (which == "C") r = check_condition_C(c, grid);
  else if (which == "Cprime") r = check_condition_Cprime(c, grid);
  else throw ConfigError("condition must be auto, C or Cprime");
  Verdict v = status_verdict("condition_" + which, Direction::GreaterEq, r.min_margin, 0.0, 0.0, r.passed);
  v.inputs = {{"c", c.label()},
              {"grid", format_double(grid.x_min) + ":" + format_double(grid.x_max) + ":" + std::to_string(grid.n_points) +
                           (grid.log_spaced ? ":log" : ":lin")}};
  v.note = r.summary;
  report.verdicts.push_back(v);
  report.details["condition"] = to_json(r);
  return report;
}

Report cmd_report(const RunConfig& cfg) {
  Report report;
  if (!cfg.has("input")) throw ConfigError("report needs --input");
  const std::string path = cfg.text("input", "");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read report " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("report " + path + " is not valid JSON: " + e.what());
  }
  report.verdicts = verdicts_from_json(doc);
  report.details["source_command"] = doc.value("command", "");
  return report;
}

}  // namespace

Report execute(const RunConfig& cfg, int& exit_code) {
  const auto start = std::chrono::steady_clock::now();
  Report report;
  exit_code = -1;
  if (cfg.command == "verify") report = cmd_verify(cfg);
  else if (cfg.command == "scan") report = cmd_scan(cfg, exit_code);
  else if (cfg.command == "mc-check") report = cmd_mc_check(cfg);
  else if (cfg.command == "conditions") report = cmd_conditions(cfg);
  else if (cfg.command == "report") report = cmd_report(cfg);
  else throw ConfigError("unknown command '" + cfg.command + "'");
  report.command = cfg.command;
  report.inputs = echo_inputs(cfg);
  if (exit_code < 0) exit_code = all_hold(report.verdicts) ? kPass : kCheckFailed;
  report.timing_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks of Gaussian hypercontractivity-type inequalities", "ouhyper"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> scalar;
  std::vector<std::string> fs;
  std::vector<std::string> c_axes;
  bool condition_override = false;

  app.add_option("--config", config_path, "config file ([section] headers, key = value lines)");
  app.add_option("--set", sets, "override any key: key=value (repeatable)");
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  const Flag flags[] = {
      {"--output,-o", "output", "report path (stdout when omitted)"},
      {"--format", "format", "json, csv or table"},
      {"--seed", "seed", "RNG seed (default 0x5EED)"},
      {"--inner-order", "inner_order", "inner quadrature nodes per axis"},
      {"--outer-order", "outer_order", "outer quadrature nodes per axis"},
      {"--threads", "threads", "worker threads"},
      {"--dim", "dim", "dimension (1..3)"},
      {"--inequality", "inequality", "hc, ehc, genhc, lsi, glsi, rhc, genrhc, ctmain, sandwich, integrability, equiv"},
      {"--p", "p", "exponent p of hc"},
      {"--t", "t", "time t"},
      {"--alpha", "alpha", "exponent alpha of rhc"},
      {"--s", "s", "outer sandwich time s"},
      {"--b", "b", "loglog offset b"},
      {"--c", "c", "generator spec, e.g. exm1:alpha=1,beta=1"},
      {"--grid", "grid", "condition grid xmin:xmax:n[:log|lin]"},
      {"--condition", "condition", "auto, C or Cprime"},
      {"--paths", "paths", "Monte Carlo paths"},
      {"--t-grid", "t_grid", "comma-separated times"},
      {"--p-grid", "p_grid", "comma-separated p values"},
      {"--alpha-grid", "alpha_grid", "comma-separated alpha values"},
      {"--s-grid", "s_grid", "comma-separated s values"},
      {"--tau-grid", "tau_grid", "martingale times for the generalized curve"},
      {"--search", "search", "counterexample search budget"},
      {"--q-scale", "q_scale", "diagnostic multiplier of the hc exponent"},
      {"--corpus-filter", "corpus_filter", "keep function specs containing this text"},
      {"--input", "input", "stored JSON report (report command)"},
  };
  for (const Flag& flag : flags) app.add_option(flag.name, scalar[flag.key], flag.help);
  app.add_option("--f", fs, "test function spec (repeatable)");
  app.add_option("--c-axis", c_axes, "generator axis param=v1,v2,... (repeatable, scan)");
  app.add_flag("--condition-override", condition_override, "run generalized checks even when c fails its condition");

  for (const char* name : {"verify", "scan", "mc-check", "conditions", "report"}) {
    static const std::map<std::string, std::string> about{
        {"verify", "run inequality checks on test functions"},
        {"scan", "sweep an inequality over a parameter grid"},
        {"mc-check", "Monte Carlo identity-in-law and martingale checks"},
        {"conditions", "check a generator's structural condition on a grid"},
        {"report", "render a stored JSON report"},
    };
    app.add_subcommand(name, about.at(name));
  }

  const std::string usage = app.help();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << usage;
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << usage;
    return kConfigError;
  }

  try {
    RunConfig cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) {
      cfg.config_path = config_path;
      load_config_file(config_path, cfg);
    }
    for (const Flag& flag : flags) {
      const std::string long_name = std::string(flag.name).substr(0, std::string(flag.name).find(','));
      if (app.count(long_name) > 0) cfg.set(flag.key, scalar[flag.key]);
    }
    if (!fs.empty()) {
      cfg.values["f"].clear();
      for (const auto& f : fs) cfg.set("f", f, true);
    }
    for (const auto& axis : c_axes) {
      const auto eq = axis.find('=');
      if (eq == std::string::npos) throw ConfigError("--c-axis expects param=v1,v2,...");
      cfg.set("c." + axis.substr(0, eq), axis.substr(eq + 1));
    }
    if (condition_override) cfg.set("condition_override", "true");
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.output = cfg.text("output", "");
    cfg.format = cfg.text("format", "json");
    if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "table") {
      throw ConfigError("format must be json, csv or table");
    }

    int code = kPass;
    const Report report = execute(cfg, code);
    std::string text;
    if (cfg.format == "json") text = render_json(report);
    else if (cfg.format == "csv") text = render_csv(report.verdicts);
    else text = render_table(report.verdicts);
    if (cfg.output.empty()) {
      out << text;
    } else {
      write_atomic(cfg.output, text);
    }
    std::size_t held = 0;
    for (const auto& v : report.verdicts) held += v.holds ? 1 : 0;
    err << cfg.command << ": " << held << "/" << report.verdicts.size() << " verdicts hold\n";
    return code;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const PreconditionError& e) {
    err << "precondition not met: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConvergenceError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumericError;
  } catch (const RangeError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumericError;
  } catch (const EvaluationError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumericError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kNumericError;
  }
}

}  // namespace ouhyper::cli
