// dshrink: fit, simulate and prostate subcommands.
//
// Exit codes: 0 success, 1 usage/configuration, 2 data error, 3 numerical failure.

#include "dshrink/errors.hpp"
#include "dshrink/experiments.hpp"
#include "dshrink/prostate_data.hpp"
#include "dshrink/simulation.hpp"
#include "dshrink/svg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#ifndef DSHRINK_DEFAULT_DATA
#define DSHRINK_DEFAULT_DATA "data/prostate.csv"
#endif

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

using namespace dshrink;

struct CommonOptions {
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
  std::string out_dir = ".";
  std::string format = "table";
  /// Subcommand arguments minus --out-dir and --workers, as recorded in the
  /// manifest for replay.
  std::vector<std::string> arguments;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  bool svg() const { return format == "table+svg"; }
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--seed", o.seed, "Master random seed")->capture_default_str();
  cmd->add_option("--workers", o.workers, "Maximum worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--out-dir", o.out_dir, "Directory for output files")->capture_default_str();
  cmd->add_option("--format", o.format, "Outputs to write")
      ->check(CLI::IsMember({"table", "table+svg"}))
      ->capture_default_str();
}

/// Collects output files and writes the run manifest last.
class RunWriter {
 public:
  RunWriter(std::string subcommand, const CommonOptions& common)
      : subcommand_(std::move(subcommand)), arguments_(common.arguments), dir_(common.out_dir),
        start_(common.start) {
    fs::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw DataError("cannot write output file '" + (dir_ / name).string() + "'");
    out << content;
    outputs_.push_back(name);
  }

  void write(const std::string& name, const Table& table) {
    std::ostringstream os;
    write_table(os, table, ',');
    write(name, os.str());
  }

  void finish(const ordered_json& config, std::uint64_t seed) {
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
    ordered_json manifest;
    manifest["subcommand"] = subcommand_;
    manifest["version"] = DSHRINK_VERSION;
    manifest["seed"] = seed;
    manifest["config"] = config;
    manifest["arguments"] = arguments_;
    manifest["duration_seconds"] = elapsed.count();
    manifest["outputs"] = outputs_;
    std::ofstream out(dir_ / "manifest.json");
    out << manifest.dump(2) << '\n';
  }

 private:
  std::string subcommand_;
  std::vector<std::string> arguments_;
  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> outputs_;
};

std::vector<Estimator> parse_estimators(const std::vector<std::string>& names) {
  std::vector<Estimator> out;
  for (const auto& n : names) out.push_back(parse_estimator(n));
  return out;
}

std::vector<std::string> estimator_names(const std::vector<Estimator>& es) {
  std::vector<std::string> out;
  for (const auto e : es) out.emplace_back(to_string(e));
  return out;
}

ordered_json solver_json(const LassoConfig& s, const PathSettings& p) {
  return {{"tol", s.tol}, {"max_sweeps", s.max_sweeps}, {"path_count", p.count},
          {"path_ratio", p.ratio}};
}

// ---------------------------------------------------------------- fit

struct FitOptions {
  std::string data;
  std::string response;
  std::string lambda;
  std::optional<double> s;
  std::vector<std::string> estimators = {"LASSO", "SL", "PRSL", "SL2", "SL3_SQRT", "SL3_LOG"};
  bool no_scale = false;
  bool shrink_intercept = false;
  LassoConfig solver;
  PathSettings path;
};

Dataset load_input(const std::string& path, const std::string& response) {
  if (response.empty()) return load_prostate_file(path, ProstateFormat{0, std::nullopt}).dataset;
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return load_table_dataset(in, response);
}

void run_fit(const FitOptions& o, const CommonOptions& common) {
  if (o.lambda.empty() == !o.s.has_value()) {
    throw ConfigError("fit needs exactly one of --lambda or --s");
  }
  const Dataset d = load_input(o.data, o.response);
  const bool scale = !o.no_scale;

  std::vector<EstimatorSpec> specs;
  double lambda_value = 0.0;
  if (!o.lambda.empty()) {
    if (o.lambda == "max") {
      lambda_value = lambda_max(standardize(d, scale));
    } else {
      lambda_value = parse_double(o.lambda, "--lambda");
    }
  }
  for (const Estimator e : parse_estimators(o.estimators)) {
    EstimatorSpec spec;
    spec.penalty = o.s ? PenaltyKind::Bound : PenaltyKind::Lambda;
    spec.value = o.s ? *o.s : lambda_value;
    spec.estimator = e;
    spec.scale_columns = scale;
    spec.shrink_intercept = o.shrink_intercept;
    spec.solver = o.solver;
    spec.path = o.path;
    specs.push_back(spec);
  }
  const auto fits = fit_pipelines(d, specs);
  for (const auto& f : fits) {
    if (!f.lasso.converged) throw NumericalError("LASSO solver did not converge");
  }

  RunWriter out("fit", common);
  out.write("coefficients.csv", coefficient_table(specs, fits, d.feature_names()));
  out.write("diagnostics.csv", diagnostics_table(specs, fits));
  ordered_json cfg = {{"data", o.data},
                      {"response", o.response.empty() ? "lpsa" : o.response},
                      {"penalty", o.s ? "s" : "lambda"},
                      {"value", o.s ? *o.s : lambda_value},
                      {"estimators", o.estimators},
                      {"scale_columns", scale},
                      {"shrink_intercept", o.shrink_intercept},
                      {"solver", solver_json(o.solver, o.path)}};
  out.finish(cfg, common.seed);
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  SimConfig cfg;
  std::vector<std::string> estimators = {"LASSO", "SL", "PRSL", "SL2", "SL3_SQRT", "SL3_LOG"};
  std::string rule = "cv-min";
  std::string scope = "per-replication";
};

void run_simulate(SimulateOptions o, const CommonOptions& common) {
  SimConfig& cfg = o.cfg;
  cfg.seed = common.seed;
  cfg.workers = common.workers;
  cfg.estimators = parse_estimators(o.estimators);
  cfg.lambda_rule.kind = parse_lambda_rule(o.rule);
  cfg.lambda_rule.scope = parse_selection_scope(o.scope);
  const SimResult result = run_simulation(cfg);

  RunWriter out("simulate", common);
  out.write("rmse.csv", export_rmse_table(result));
  out.write("grid.csv", export_grid_table(result));
  if (common.svg()) {
    svg::LineChart chart;
    std::ostringstream title;
    title << "RMSE vs population R2 (n=" << cfg.n << ", p=" << cfg.p
          << ", alpha=" << format_double(cfg.alpha) << ")";
    chart.title = title.str();
    chart.x_label = "population R2";
    chart.y_label = "RMSE relative to LASSO";
    chart.reference_y = 1.0;
    for (const Estimator e : cfg.estimators) {
      svg::Series s;
      s.name = std::string(to_string(e));
      for (const auto& c : result.cells) {
        if (c.estimator == e) {
          s.x.push_back(c.r2);
          s.y.push_back(c.rmse);
        }
      }
      chart.series.push_back(std::move(s));
    }
    out.write("rmse.svg", svg::render(chart));
  }
  ordered_json jcfg = {{"n", cfg.n},
                       {"p", cfg.p},
                       {"alpha", cfg.alpha},
                       {"r2_max", cfg.r2_max},
                       {"grid_points", cfg.grid_points},
                       {"replications", cfg.replications},
                       {"estimators", o.estimators},
                       {"lambda_rule", result.lambda_rule},
                       {"scale_columns", cfg.scale_columns},
                       {"workers", cfg.workers},
                       {"solver", solver_json(cfg.solver, PathSettings{cfg.lambda_rule.grid_count,
                                                                       cfg.lambda_rule.grid_ratio})}};
  out.finish(jcfg, common.seed);
}

// ---------------------------------------------------------------- prostate

struct ProstateOptions {
  std::string data = DSHRINK_DEFAULT_DATA;
  ProstateAnalysisConfig cfg;
  std::vector<std::string> estimators = {"LASSO", "PRSL", "SL2", "SL3_SQRT", "SL3_LOG"};
  std::optional<double> s;
};

void run_prostate(ProstateOptions o, const CommonOptions& common) {
  ProstateAnalysisConfig& cfg = o.cfg;
  cfg.seed = common.seed;
  cfg.workers = common.workers;
  cfg.estimators = parse_estimators(o.estimators);
  cfg.fixed_s = o.s;
  const ProstateData data = load_prostate_file(o.data);
  const Dataset& d = data.dataset;
  const ProstateAnalysis a = analyze_prostate(d, cfg);

  RunWriter out("prostate", common);
  out.write("path.csv", path_table(a.path, a.sd));
  if (!a.cv_curve.empty()) out.write("cv_curve.csv", cv_curve_table(a.path, a.cv_curve));
  Table sel;
  sel.header = {"s_hat", "lambda", "rule"};
  sel.rows.push_back({format_double(a.selected_s),
                      format_double(a.fits.empty() ? 0.0 : a.fits.front().lasso.lambda),
                      o.s ? "fixed" : "one-se"});
  out.write("selection.csv", sel);
  const EvalReport* report = a.report ? &*a.report : nullptr;
  out.write("table2.csv", coefficient_table(a.specs, a.fits, d.feature_names(), report));
  out.write("diagnostics.csv", diagnostics_table(a.specs, a.fits));
  if (report) {
    out.write("rpe.csv", report_table(*report));
    out.write("bootstrap_coefficients.csv", coefficient_dump(*report));
  }

  if (common.svg()) {
    svg::LineChart chart;
    chart.title = "LASSO coefficients vs standardized bound s";
    chart.x_label = "s";
    chart.y_label = "coefficient";
    chart.marker_x = a.selected_s;
    for (Index j = 0; j < d.p(); ++j) {
      svg::Series s;
      s.name = d.feature_names()[static_cast<std::size_t>(j)];
      for (const auto& pt : a.path.points) {
        s.x.push_back(pt.s);
        s.y.push_back(destandardize(pt.fit.slopes, a.sd).slopes(j));
      }
      chart.series.push_back(std::move(s));
    }
    out.write("path.svg", svg::render(chart));
    if (report) {
      svg::BoxPlot box;
      box.title = "Bootstrap coefficient estimates at s = " + format_double(a.selected_s);
      box.y_label = "coefficient";
      for (const auto& e : report->estimators) box.legend.push_back(e.label);
      for (Index j = 0; j < d.p(); ++j) {
        svg::BoxGroup g;
        g.name = d.feature_names()[static_cast<std::size_t>(j)];
        for (const auto& e : report->estimators) {
          const Vector col = e.bootstrap_coefficients.col(j);
          g.boxes.emplace_back(col.data(), col.data() + col.size());
        }
        box.groups.push_back(std::move(g));
      }
      out.write("boxplot.svg", svg::render(box));
    }
  }

  ordered_json jcfg = {{"data", o.data},
                       {"folds", cfg.folds},
                       {"bootstrap", cfg.replicates},
                       {"estimators", o.estimators},
                       {"selection", o.s ? "fixed" : "one-se"},
                       {"s", a.selected_s},
                       {"scale_columns", cfg.scale_columns},
                       {"shrink_intercept", cfg.shrink_intercept},
                       {"reselect_per_replicate", cfg.reselect_per_replicate},
                       {"workers", cfg.workers},
                       {"solver", solver_json(cfg.solver, cfg.path)}};
  if (report) {
    jcfg["replicates_used"] = report->replicates_used;
    jcfg["replicates_skipped"] = report->replicates_skipped;
  }
  out.finish(jcfg, common.seed);
}

void add_solver(CLI::App* cmd, LassoConfig& solver, PathSettings* path) {
  cmd->add_option("--tol", solver.tol, "Coordinate-descent tolerance")->capture_default_str();
  cmd->add_option("--max-sweeps", solver.max_sweeps, "Sweep limit per fit")->capture_default_str();
  if (path) {
    cmd->add_option("--path-count", path->count, "Lambda grid size")->capture_default_str();
    cmd->add_option("--path-ratio", path->ratio, "Smallest/largest lambda")->capture_default_str();
  }
}

bool is_placement_option(const std::string& arg) {
  return arg == "--out-dir" || arg == "--workers";
}

/// Arguments after the subcommand with placement options removed and the
/// seed made explicit.
std::vector<std::string> replay_arguments(const std::vector<std::string>& args,
                                          std::uint64_t seed) {
  std::vector<std::string> out;
  bool has_seed = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    const std::string name = a.substr(0, a.find('='));
    if (is_placement_option(name)) {
      if (name == a) ++i;  // skip the separate value
      continue;
    }
    if (name == "--seed") has_seed = true;
    out.push_back(a);
  }
  if (!has_seed) {
    out.push_back("--seed");
    out.push_back(std::to_string(seed));
  }
  return out;
}

/// argv for re-running the invocation stored in `manifest_path`, with the
/// caller's extra arguments (normally --out-dir/--workers) appended.
std::vector<std::string> argv_from_manifest(const std::string& manifest_path,
                                            const std::vector<std::string>& extras) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open manifest '" + manifest_path + "'");
  ordered_json m;
  try {
    in >> m;
  } catch (const ordered_json::exception& e) {
    throw DataError("manifest '" + manifest_path + "' is not valid JSON: " + e.what());
  }
  if (!m.contains("subcommand") || !m.contains("arguments")) {
    throw DataError("manifest '" + manifest_path + "' lacks subcommand or arguments");
  }
  if (m.value("version", "") != std::string(DSHRINK_VERSION)) {
    std::cerr << "dshrink: warning: manifest was written by version " << m.value("version", "?")
              << ", this is " << DSHRINK_VERSION << '\n';
  }
  std::vector<std::string> out{m["subcommand"].get<std::string>()};
  for (const auto& a : m["arguments"]) out.push_back(a.get<std::string>());
  for (const auto& e : extras) {
    if (!is_placement_option(e.substr(0, e.find('='))) && e.rfind("--", 0) == 0) {
      throw ConfigError("only --out-dir and --workers may accompany --manifest, got " + e);
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-shrinkage (Stein-type LASSO) regression tools"};
  app.set_version_flag("--version", DSHRINK_VERSION);
  app.require_subcommand(0, 1);
  std::string manifest_path;
  app.add_option("--manifest", manifest_path,
                 "Re-run the invocation recorded in a manifest.json (accepts --out-dir, --workers)");

  CommonOptions common;
  FitOptions fit;
  SimulateOptions sim;
  ProstateOptions pro;

  auto* fit_cmd = app.add_subcommand("fit", "Fit LASSO and shrinkage variants on a data file");
  add_common(fit_cmd, common);
  fit_cmd->add_option("--data", fit.data, "Input file (prostate layout unless --response)")
      ->required();
  fit_cmd->add_option("--response", fit.response, "Response column of a generic table");
  fit_cmd->add_option("--lambda", fit.lambda,
                      "Penalty of RSS + lambda*|b|_1 on standardized columns, or 'max'");
  fit_cmd->add_option("--s", fit.s, "Standardized bound |b|_1 / |b_densest|_1");
  fit_cmd->add_option("--estimators", fit.estimators, "LASSO SL PRSL SL2 SL3_SQRT SL3_LOG")
      ->delimiter(',');
  fit_cmd->add_flag("--no-scale", fit.no_scale, "Center only; do not scale columns");
  fit_cmd->add_flag("--shrink-intercept", fit.shrink_intercept, "Scale the intercept too");
  add_solver(fit_cmd, fit.solver, &fit.path);

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo RMSE study");
  add_common(sim_cmd, common);
  sim_cmd->add_option("--n", sim.cfg.n, "Sample size")->capture_default_str();
  sim_cmd->add_option("--p", sim.cfg.p, "Number of predictors")->capture_default_str();
  sim_cmd->add_option("--alpha", sim.cfg.alpha, "Coefficient decay")->capture_default_str();
  sim_cmd->add_option("--r2-max", sim.cfg.r2_max, "Upper end of the R2 grid")->capture_default_str();
  sim_cmd->add_option("--grid-points", sim.cfg.grid_points, "R2 grid size")->capture_default_str();
  sim_cmd->add_option("--replications", sim.cfg.replications, "Replications per grid point")
      ->capture_default_str();
  sim_cmd->add_option("--estimators", sim.estimators, "Reported estimators")->delimiter(',');
  sim_cmd->add_option("--lambda-rule", sim.rule, "cv-min, cv-1se or fixed")->capture_default_str();
  sim_cmd->add_option("--lambda", sim.cfg.lambda_rule.fixed_lambda, "Penalty for --lambda-rule fixed");
  sim_cmd->add_option("--scope", sim.scope, "per-replication or per-configuration")
      ->capture_default_str();
  sim_cmd->add_option("--folds", sim.cfg.lambda_rule.folds, "CV folds")->capture_default_str();
  sim_cmd->add_option("--path-count", sim.cfg.lambda_rule.grid_count, "Lambda grid size")
      ->capture_default_str();
  sim_cmd->add_option("--path-ratio", sim.cfg.lambda_rule.grid_ratio, "Smallest/largest lambda")
      ->capture_default_str();
  sim_cmd->add_flag("--scale", sim.cfg.scale_columns, "Scale simulated columns to unit variance");
  add_solver(sim_cmd, sim.cfg.solver, nullptr);

  auto* pro_cmd = app.add_subcommand("prostate", "Path, one-SE selection and bootstrap RPE");
  add_common(pro_cmd, common);
  pro_cmd->add_option("--data", pro.data, "Prostate data file")->capture_default_str();
  pro_cmd->add_option("--bootstrap", pro.cfg.replicates, "Bootstrap replicates (0 = none)")
      ->capture_default_str();
  pro_cmd->add_option("--folds", pro.cfg.folds, "CV folds")->capture_default_str();
  pro_cmd->add_option("--estimators", pro.estimators, "Table columns")->delimiter(',');
  pro_cmd->add_option("--s", pro.s, "Use this bound instead of the one-SE choice");
  pro_cmd->add_flag("--shrink-intercept", pro.cfg.shrink_intercept, "Scale the intercept too");
  pro_cmd->add_flag("--reselect", pro.cfg.reselect_per_replicate,
                    "Re-select s inside every bootstrap replicate");
  add_solver(pro_cmd, pro.cfg.solver, &pro.cfg.path);

  // Set after the subcommands exist so they keep rejecting unknown options.
  app.allow_extras();

  std::vector<std::string> invoked(argv + 1, argv + argc);
  try {
    app.parse(argc, argv);
    if (manifest_path.empty()) {
      if (!app.remaining().empty()) {
        throw CLI::ExtrasError(app.remaining());
      }
      if (app.get_subcommands().empty()) throw CLI::RequiredError("a subcommand");
    } else {
      if (!app.get_subcommands().empty()) {
        throw CLI::ValidationError("--manifest", "cannot be combined with a subcommand");
      }
      std::vector<std::string> replay;
      try {
        replay = argv_from_manifest(manifest_path, app.remaining());
      } catch (const DataError& e) {
        std::cerr << "dshrink: data error: " << e.what() << '\n';
        return 2;
      } catch (const ConfigError& e) {
        std::cerr << "dshrink: usage error: " << e.what() << '\n';
        return 1;
      }
      invoked = replay;
      std::reverse(replay.begin(), replay.end());  // CLI11 consumes from the back
      manifest_path.clear();
      app.clear();
      app.parse(replay);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  {
    const auto* sub = app.get_subcommands().front();
    std::vector<std::string> sub_args;
    const auto pos = std::find(invoked.begin(), invoked.end(), sub->get_name());
    if (pos != invoked.end()) sub_args.assign(pos + 1, invoked.end());
    common.arguments = replay_arguments(sub_args, common.seed);
    common.start = std::chrono::steady_clock::now();
  }

  try {
    if (*fit_cmd) run_fit(fit, common);
    if (*sim_cmd) run_simulate(sim, common);
    if (*pro_cmd) run_prostate(pro, common);
  } catch (const ConfigError& e) {
    std::cerr << "dshrink: usage error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "dshrink: data error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "dshrink: numerical error: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "dshrink: numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "dshrink: error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
