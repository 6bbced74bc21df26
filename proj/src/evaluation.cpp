#include "dshrink/evaluation.hpp"

#include "dshrink/errors.hpp"
#include "dshrink/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace dshrink {

std::vector<Index> FoldPlan::fold_sizes() const {
  std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
  for (const int f : assignment) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

std::vector<Index> FoldPlan::train_rows(int fold) const {
  std::vector<Index> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) rows.push_back(static_cast<Index>(i));
  }
  return rows;
}

std::vector<Index> FoldPlan::test_rows(int fold) const {
  std::vector<Index> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) rows.push_back(static_cast<Index>(i));
  }
  return rows;
}

FoldPlan kfold_split(Index n, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("k-fold split needs k >= 2");
  if (static_cast<Index>(k) > n) {
    throw ConfigError("cannot split " + std::to_string(n) + " rows into " + std::to_string(k) +
                      " folds");
  }
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignment.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t pos = 0; pos < perm.size(); ++pos) {
    plan.assignment[static_cast<std::size_t>(perm[pos])] = static_cast<int>(pos % k);
  }
  return plan;
}

std::string EstimatorSpec::label() const {
  if (penalty == PenaltyKind::Baseline) return "BASELINE";
  return std::string(to_string(estimator));
}

namespace {

bool same_base(const EstimatorSpec& a, const EstimatorSpec& b) {
  return a.penalty == b.penalty && a.value == b.value && a.scale_columns == b.scale_columns &&
         a.solver.tol == b.solver.tol && a.solver.max_sweeps == b.solver.max_sweeps &&
         a.path.count == b.path.count && a.path.ratio == b.path.ratio;
}

struct BaseFit {
  StandardizedDataset sd;
  LassoFit lasso;
  double s = 0.0;
  std::optional<SteinInputs> inputs;
  bool inputs_tried = false;
};

BaseFit fit_base(const Dataset& d, const EstimatorSpec& spec) {
  BaseFit base;
  base.sd = standardize(d, spec.scale_columns);
  switch (spec.penalty) {
    case PenaltyKind::Baseline: {
      base.lasso.slopes = Vector::Zero(d.p());
      base.lasso.converged = true;
      base.lasso.objective = base.sd.yc.squaredNorm();
      break;
    }
    case PenaltyKind::Lambda: {
      LassoConfig cfg = spec.solver;
      cfg.lambda = spec.value;
      base.lasso = fit_lasso(base.sd, cfg);
      const double top = lambda_max(base.sd);
      if (top > 0.0) {
        cfg.lambda = top * spec.path.ratio;
        const LassoFit densest = fit_lasso(base.sd, cfg, base.lasso.slopes);
        base.s = s_value(base.lasso, densest.slopes.lpNorm<1>());
      }
      break;
    }
    case PenaltyKind::Bound: {
      const BoundFit bf = fit_at_bound(base.sd, spec.value, spec.path, spec.solver);
      base.lasso = bf.fit;
      base.s = bf.s;
      break;
    }
  }
  return base;
}

PipelineFit finish(BaseFit& base, const EstimatorSpec& spec) {
  PipelineFit out;
  out.sd = base.sd;
  out.lasso = base.lasso;
  out.s = base.s;
  out.factor = 1.0;
  out.standardized_slopes = base.lasso.slopes;

  const auto variant = as_variant(spec.estimator);
  if (variant && spec.penalty != PenaltyKind::Baseline) {
    if (!base.inputs_tried) {
      base.inputs_tried = true;
      try {
        base.inputs = stein_inputs(base.sd, base.lasso);
      } catch (const DomainError&) {
      } catch (const NumericalError&) {
      }
    }
    if (base.inputs) {
      const ShrunkenFit sf = shrink(base.lasso, *variant, *base.inputs);
      out.inputs = base.inputs;
      out.factor = sf.factor;
      out.standardized_slopes = sf.slopes;
    } else {
      out.degenerate = true;
    }
  }

  out.centered_intercept = spec.shrink_intercept ? out.factor * base.sd.y_mean : base.sd.y_mean;
  out.coefficients.slopes = out.standardized_slopes.array() / base.sd.column_scales.array();
  out.coefficients.intercept =
      out.centered_intercept - base.sd.column_means.dot(out.coefficients.slopes);
  return out;
}

}  // namespace

std::vector<PipelineFit> fit_pipelines(const Dataset& d, std::span<const EstimatorSpec> specs) {
  std::vector<PipelineFit> fits;
  fits.reserve(specs.size());
  std::vector<std::pair<EstimatorSpec, BaseFit>> cache;
  for (const auto& spec : specs) {
    BaseFit* base = nullptr;
    for (auto& [key, bf] : cache) {
      if (same_base(key, spec)) base = &bf;
    }
    if (!base) {
      cache.emplace_back(spec, fit_base(d, spec));
      base = &cache.back().second;
    }
    fits.push_back(finish(*base, spec));
  }
  return fits;
}

PipelineFit fit_pipeline(const Dataset& d, const EstimatorSpec& spec) {
  return fit_pipelines(d, std::span(&spec, 1)).front();
}

namespace {

double fold_se(const std::vector<double>& fold_pe) {
  const auto k = static_cast<double>(fold_pe.size());
  if (fold_pe.size() < 2) return 0.0;
  const double mean = std::accumulate(fold_pe.begin(), fold_pe.end(), 0.0) / k;
  double ss = 0.0;
  for (const double v : fold_pe) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
}

void check_plan(const Dataset& d, const FoldPlan& plan) {
  if (static_cast<Index>(plan.assignment.size()) != d.n()) {
    throw ConfigError("fold plan covers " + std::to_string(plan.assignment.size()) +
                      " rows, dataset has " + std::to_string(d.n()));
  }
}

}  // namespace

std::vector<CvResult> cv_prediction_errors(const Dataset& d, std::span<const EstimatorSpec> specs,
                                           const FoldPlan& plan) {
  check_plan(d, plan);
  std::vector<CvResult> results(specs.size());
  std::vector<double> sse(specs.size(), 0.0);
  for (int fold = 0; fold < plan.k; ++fold) {
    const auto train_idx = plan.train_rows(fold);
    const auto test_idx = plan.test_rows(fold);
    const Dataset train = d.select_rows(train_idx);
    const Dataset test = d.select_rows(test_idx);
    const auto fits = fit_pipelines(train, specs);
    for (std::size_t e = 0; e < specs.size(); ++e) {
      const Vector resid = test.y() - predict(fits[e].coefficients, test.x());
      const double fold_sse = resid.squaredNorm();
      sse[e] += fold_sse;
      results[e].fold_pe.push_back(fold_sse / static_cast<double>(test.n()));
      results[e].degenerate_folds.push_back(fits[e].degenerate);
      if (fits[e].degenerate) ++results[e].degenerate_count;
    }
  }
  for (std::size_t e = 0; e < specs.size(); ++e) {
    results[e].pe_mean = sse[e] / static_cast<double>(d.n());
    results[e].pe_se = fold_se(results[e].fold_pe);
  }
  return results;
}

CvResult cv_prediction_error(const Dataset& d, const EstimatorSpec& spec, const FoldPlan& plan) {
  return cv_prediction_errors(d, std::span(&spec, 1), plan).front();
}

namespace {

std::vector<CvPoint> summarize_curve(const std::vector<std::vector<double>>& fold_pe,
                                     const std::vector<double>& sse, Index n) {
  std::vector<CvPoint> curve(sse.size());
  for (std::size_t i = 0; i < sse.size(); ++i) {
    std::vector<double> per_fold;
    per_fold.reserve(fold_pe.size());
    for (const auto& f : fold_pe) per_fold.push_back(f[i]);
    curve[i].pe_mean = sse[i] / static_cast<double>(n);
    curve[i].pe_se = fold_se(per_fold);
  }
  return curve;
}

}  // namespace

std::vector<CvPoint> cv_curve_bounds(const Dataset& d, std::span<const double> bounds,
                                     const FoldPlan& plan, bool scale_columns,
                                     const LassoConfig& solver, const PathSettings& path) {
  check_plan(d, plan);
  std::vector<double> sse(bounds.size(), 0.0);
  std::vector<std::vector<double>> fold_pe;
  for (int fold = 0; fold < plan.k; ++fold) {
    const Dataset train = d.select_rows(plan.train_rows(fold));
    const Dataset test = d.select_rows(plan.test_rows(fold));
    const StandardizedDataset sd = standardize(train, scale_columns);
    const auto grid = lambda_grid(sd, path.count, path.ratio);
    const LassoPath fold_path = compute_path(sd, grid, solver);
    const LassoGram gram = LassoGram::of(sd);
    std::vector<double> per(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      const BoundFit bf = fit_at_bound(sd, gram, fold_path, bounds[i], solver);
      const Vector resid = test.y() - predict(destandardize(bf.fit.slopes, sd), test.x());
      sse[i] += resid.squaredNorm();
      per[i] = resid.squaredNorm() / static_cast<double>(test.n());
    }
    fold_pe.push_back(std::move(per));
  }
  return summarize_curve(fold_pe, sse, d.n());
}

std::vector<CvPoint> cv_curve_lambdas(const Dataset& d, std::span<const double> lambdas,
                                      const FoldPlan& plan, bool scale_columns,
                                      const LassoConfig& solver) {
  check_plan(d, plan);
  std::vector<double> sse(lambdas.size(), 0.0);
  std::vector<std::vector<double>> fold_pe;
  for (int fold = 0; fold < plan.k; ++fold) {
    const Dataset train = d.select_rows(plan.train_rows(fold));
    const Dataset test = d.select_rows(plan.test_rows(fold));
    const StandardizedDataset sd = standardize(train, scale_columns);
    const LassoPath fold_path = compute_path(sd, lambdas, solver);
    std::vector<double> per(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const Vector resid =
          test.y() - predict(destandardize(fold_path.points[i].fit.slopes, sd), test.x());
      sse[i] += resid.squaredNorm();
      per[i] = resid.squaredNorm() / static_cast<double>(test.n());
    }
    fold_pe.push_back(std::move(per));
  }
  return summarize_curve(fold_pe, sse, d.n());
}

std::size_t cv_min_index(std::span<const CvPoint> curve) {
  if (curve.empty()) throw ConfigError("empty CV curve");
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].pe_mean < curve[best].pe_mean) best = i;
  }
  return best;
}

ModelSelection one_se_rule(const LassoPath& path, std::span<const CvPoint> curve) {
  if (curve.size() != path.points.size()) {
    throw ConfigError("CV curve has " + std::to_string(curve.size()) + " points, path has " +
                      std::to_string(path.points.size()));
  }
  const std::size_t best = cv_min_index(curve);
  const double threshold = curve[best].pe_mean + curve[best].pe_se;
  std::size_t chosen = best;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i].pe_mean <= threshold && path.points[i].s < path.points[chosen].s) chosen = i;
  }
  // Among equal s prefer the earliest (largest lambda) point.
  for (std::size_t i = 0; i < chosen; ++i) {
    if (curve[i].pe_mean <= threshold && path.points[i].s == path.points[chosen].s) {
      chosen = i;
      break;
    }
  }
  return ModelSelection{chosen, path.points[chosen].s, path.points[chosen].lambda};
}

namespace {

struct ReplicateOutcome {
  bool skipped = true;
  std::vector<double> pe;       // per spec, plus the reference LASSO last
  std::vector<Vector> slopes;   // per spec
  std::vector<double> s;        // per spec
  int degenerate_folds = 0;
};

}  // namespace

EvalReport bootstrap_evaluate(const Dataset& d, std::span<const EstimatorSpec> specs,
                              const BootstrapOptions& options) {
  if (options.replicates < 1) throw ConfigError("bootstrap needs at least one replicate");
  if (specs.empty()) throw ConfigError("bootstrap needs at least one estimator");
  if (options.folds < 2) throw ConfigError("bootstrap CV needs at least 2 folds");

  std::vector<EstimatorSpec> all(specs.begin(), specs.end());
  EstimatorSpec reference = specs.front();
  reference.estimator = Estimator::Lasso;
  reference.shrink_intercept = false;
  all.push_back(reference);

  const Index n = d.n();
  const auto B = static_cast<std::size_t>(options.replicates);
  std::vector<ReplicateOutcome> outcomes(B);

  parallel_for(B, options.workers, [&](std::size_t b) {
    Rng rng = make_stream(options.seed, {b, 0});
    std::uniform_int_distribution<Index> pick(0, n - 1);
    std::vector<Index> rows(static_cast<std::size_t>(n));
    for (auto& r : rows) r = pick(rng);
    const Dataset sample = d.select_rows(rows);
    ReplicateOutcome& out = outcomes[b];
    try {
      std::vector<EstimatorSpec> local = all;
      if (options.reselect_per_replicate) {
        const StandardizedDataset sd = standardize(sample, reference.scale_columns);
        const auto grid = lambda_grid(sd, reference.path.count, reference.path.ratio);
        const LassoPath path = compute_path(sd, grid, reference.solver);
        std::vector<double> bounds;
        for (const auto& pt : path.points) bounds.push_back(pt.s);
        const FoldPlan inner = kfold_split(n, options.folds, derive_seed(options.seed, {b, 2}));
        const auto curve = cv_curve_bounds(sample, bounds, inner, reference.scale_columns,
                                           reference.solver, reference.path);
        const double s_hat = one_se_rule(path, curve).s;
        for (auto& spec : local) {
          if (spec.penalty == PenaltyKind::Bound) spec.value = s_hat;
        }
      }
      const FoldPlan plan = kfold_split(n, options.folds, derive_seed(options.seed, {b, 1}));
      const auto cv = cv_prediction_errors(sample, local, plan);
      const auto fits = fit_pipelines(sample, local);
      for (std::size_t e = 0; e < local.size(); ++e) {
        out.pe.push_back(cv[e].pe_mean);
        out.slopes.push_back(fits[e].coefficients.slopes);
        out.s.push_back(local[e].penalty == PenaltyKind::Bound ? local[e].value : fits[e].s);
        out.degenerate_folds += cv[e].degenerate_count;
      }
      out.skipped = false;
    } catch (const DataError&) {
    } catch (const DomainError&) {
    } catch (const NumericalError&) {
    }
  });

  EvalReport report;
  report.feature_names = d.feature_names();
  report.replicates_requested = options.replicates;
  for (std::size_t b = 0; b < B; ++b) {
    if (outcomes[b].skipped) {
      ++report.replicates_skipped;
    } else {
      report.replicate_ids.push_back(static_cast<int>(b));
      report.degenerate_folds += outcomes[b].degenerate_folds;
    }
  }
  report.replicates_used = static_cast<int>(report.replicate_ids.size());
  if (report.replicates_skipped >
      static_cast<int>(options.max_skip_fraction * static_cast<double>(options.replicates))) {
    throw NumericalError(std::to_string(report.replicates_skipped) + " of " +
                         std::to_string(options.replicates) +
                         " bootstrap replicates had degenerate designs");
  }

  const auto used = static_cast<std::size_t>(report.replicates_used);
  const auto mean_of = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  std::vector<double> reference_pe;
  for (const int b : report.replicate_ids) {
    reference_pe.push_back(outcomes[static_cast<std::size_t>(b)].pe.back());
  }
  const double reference_mean = mean_of(reference_pe);

  for (std::size_t e = 0; e < specs.size(); ++e) {
    EstimatorReport er;
    er.spec = specs[e];
    er.label = specs[e].label();
    er.bootstrap_coefficients.resize(static_cast<Index>(used), d.p());
    for (std::size_t r = 0; r < used; ++r) {
      const auto& oc = outcomes[static_cast<std::size_t>(report.replicate_ids[r])];
      er.bootstrap_pe.push_back(oc.pe[e]);
      er.bootstrap_coefficients.row(static_cast<Index>(r)) = oc.slopes[e].transpose();
      er.bootstrap_s.push_back(oc.s[e]);
    }
    er.pe_mean = mean_of(er.bootstrap_pe);
    if (used > 1) {
      double ss = 0.0;
      for (const double v : er.bootstrap_pe) ss += (v - er.pe_mean) * (v - er.pe_mean);
      er.pe_se = std::sqrt(ss / static_cast<double>(used - 1)) / std::sqrt(static_cast<double>(used));
    }
    er.rpe = er.pe_mean / reference_mean;
    er.selected_s = options.reselect_per_replicate ? mean_of(er.bootstrap_s) : specs[e].value;
    report.estimators.push_back(std::move(er));
  }
  return report;
}

Table report_table(const EvalReport& report) {
  Table t;
  t.header = {"estimator", "pe_mean", "pe_se", "rpe"};
  for (const auto& e : report.estimators) {
    t.rows.push_back({e.label, format_double(e.pe_mean), format_double(e.pe_se),
                      format_double(e.rpe)});
  }
  return t;
}

Table coefficient_dump(const EvalReport& report) {
  Table t;
  t.header = {"replicate", "estimator", "feature", "value"};
  for (std::size_t r = 0; r < report.replicate_ids.size(); ++r) {
    for (const auto& e : report.estimators) {
      for (std::size_t j = 0; j < report.feature_names.size(); ++j) {
        t.rows.push_back({std::to_string(report.replicate_ids[r]), e.label,
                          report.feature_names[j],
                          format_double(e.bootstrap_coefficients(static_cast<Index>(r),
                                                                 static_cast<Index>(j)))});
      }
    }
  }
  return t;
}

}  // namespace dshrink
