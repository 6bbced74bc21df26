#include "dshrink/experiments.hpp"

#include "dshrink/errors.hpp"

namespace dshrink {

ProstateAnalysis analyze_prostate(const Dataset& d, const ProstateAnalysisConfig& cfg) {
  ProstateAnalysis out;
  out.sd = standardize(d, cfg.scale_columns);
  const auto grid = lambda_grid(out.sd, cfg.path.count, cfg.path.ratio);
  out.path = compute_path(out.sd, grid, cfg.solver);

  if (cfg.fixed_s) {
    out.selected_s = *cfg.fixed_s;
  } else {
    std::vector<double> bounds;
    bounds.reserve(out.path.points.size());
    for (const auto& pt : out.path.points) bounds.push_back(pt.s);
    const FoldPlan plan = kfold_split(d.n(), cfg.folds, derive_seed(cfg.seed, {0xC5}));
    out.cv_curve = cv_curve_bounds(d, bounds, plan, cfg.scale_columns, cfg.solver, cfg.path);
    out.selection = one_se_rule(out.path, out.cv_curve);
    out.selected_s = out.selection.s;
  }

  for (const Estimator e : cfg.estimators) {
    EstimatorSpec spec;
    spec.penalty = PenaltyKind::Bound;
    spec.value = out.selected_s;
    spec.estimator = e;
    spec.scale_columns = cfg.scale_columns;
    spec.shrink_intercept = cfg.shrink_intercept;
    spec.solver = cfg.solver;
    spec.path = cfg.path;
    out.specs.push_back(spec);
  }
  out.fits = fit_pipelines(d, out.specs);

  if (cfg.replicates > 0 && !out.specs.empty()) {
    BootstrapOptions opts;
    opts.replicates = cfg.replicates;
    opts.seed = cfg.seed;
    opts.folds = cfg.folds;
    opts.workers = cfg.workers;
    opts.reselect_per_replicate = cfg.reselect_per_replicate;
    out.report = bootstrap_evaluate(d, out.specs, opts);
  }
  return out;
}

Table path_table(const LassoPath& path, const StandardizedDataset& sd) {
  Table t;
  t.header = {"s", "lambda", "feature", "coefficient"};
  for (const auto& pt : path.points) {
    const CoefficientVector c = destandardize(pt.fit.slopes, sd);
    for (Index j = 0; j < sd.p(); ++j) {
      t.rows.push_back({format_double(pt.s), format_double(pt.lambda),
                        sd.feature_names[static_cast<std::size_t>(j)], format_double(c.slopes(j))});
    }
  }
  return t;
}

Table cv_curve_table(const LassoPath& path, const std::vector<CvPoint>& curve) {
  Table t;
  t.header = {"s", "lambda", "pe_mean", "pe_se"};
  for (std::size_t i = 0; i < curve.size() && i < path.points.size(); ++i) {
    t.rows.push_back({format_double(path.points[i].s), format_double(path.points[i].lambda),
                      format_double(curve[i].pe_mean), format_double(curve[i].pe_se)});
  }
  return t;
}

Table coefficient_table(const std::vector<EstimatorSpec>& specs,
                        const std::vector<PipelineFit>& fits,
                        const std::vector<std::string>& feature_names, const EvalReport* report) {
  if (specs.size() != fits.size()) throw ConfigError("specs and fits differ in length");
  Table t;
  t.header.push_back("feature");
  for (const auto& s : specs) t.header.push_back(s.label());
  std::vector<std::string> intercept{"intercept"};
  for (const auto& f : fits) intercept.push_back(format_double(f.centered_intercept));
  t.rows.push_back(std::move(intercept));
  for (std::size_t j = 0; j < feature_names.size(); ++j) {
    std::vector<std::string> row{feature_names[j]};
    for (const auto& f : fits) row.push_back(format_double(f.coefficients.slopes(static_cast<Index>(j))));
    t.rows.push_back(std::move(row));
  }
  if (report) {
    std::vector<std::string> row{"RPE"};
    for (const auto& e : report->estimators) row.push_back(format_double(e.rpe));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table diagnostics_table(const std::vector<EstimatorSpec>& specs,
                        const std::vector<PipelineFit>& fits) {
  Table t;
  t.header = {"estimator", "s", "lambda", "a", "w", "sigma2", "factor", "degenerate", "expansion"};
  for (std::size_t e = 0; e < specs.size(); ++e) {
    const PipelineFit& f = fits[e];
    const bool has = f.inputs.has_value();
    t.rows.push_back({specs[e].label(), format_double(f.s), format_double(f.lasso.lambda),
                      has ? format_double(f.inputs->a) : "",
                      has ? format_double(f.inputs->w) : "",
                      has ? format_double(f.inputs->sigma2) : "", format_double(f.factor),
                      (f.degenerate || (has && f.inputs->w == 0.0 &&
                                        specs[e].estimator != Estimator::SL2 &&
                                        specs[e].estimator != Estimator::Lasso))
                          ? "1"
                          : "0",
                      f.factor > 1.0 ? "1" : "0"});
  }
  return t;
}

}  // namespace dshrink
