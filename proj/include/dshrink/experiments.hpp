#pragma once

#include "dshrink/core_model.hpp"
#include "dshrink/evaluation.hpp"
#include "dshrink/lasso.hpp"
#include "dshrink/random.hpp"
#include "dshrink/shrinkage.hpp"
#include "dshrink/table.hpp"

#include <optional>
#include <vector>

namespace dshrink {

/// Columns of the published coefficient/RPE table.
inline const std::vector<Estimator> kTableEstimators = {
    Estimator::Lasso, Estimator::PRSL, Estimator::SL2, Estimator::SL3Sqrt, Estimator::SL3Log};

struct ProstateAnalysisConfig {
  std::uint64_t seed = kDefaultSeed;
  int folds = 10;
  int replicates = 1000;  // 0 skips the bootstrap
  std::vector<Estimator> estimators = kTableEstimators;
  bool scale_columns = true;
  bool shrink_intercept = false;
  bool reselect_per_replicate = false;
  /// Use this bound instead of the one-SE selection.
  std::optional<double> fixed_s;
  int workers = 1;
  LassoConfig solver;
  PathSettings path;
};

struct ProstateAnalysis {
  StandardizedDataset sd;
  LassoPath path;
  std::vector<CvPoint> cv_curve;  // aligned with path.points
  ModelSelection selection;
  double selected_s = 0.0;
  std::vector<EstimatorSpec> specs;
  std::vector<PipelineFit> fits;  // full-data fits at the selected bound
  std::optional<EvalReport> report;
};

/// Path -> 10-fold CV curve over the path's bounds -> one-SE bound -> fits of
/// every estimator at that bound -> bootstrap evaluation.
ProstateAnalysis analyze_prostate(const Dataset& d, const ProstateAnalysisConfig& cfg);

/// Rows (s, lambda, feature, coefficient) in original units.
Table path_table(const LassoPath& path, const StandardizedDataset& sd);

/// Rows (s, lambda, pe_mean, pe_se).
Table cv_curve_table(const LassoPath& path, const std::vector<CvPoint>& curve);

/// Feature-by-estimator table: an "intercept" row (centered-model intercept),
/// one row per feature and, with a report, a trailing "RPE" row.
Table coefficient_table(const std::vector<EstimatorSpec>& specs,
                        const std::vector<PipelineFit>& fits,
                        const std::vector<std::string>& feature_names,
                        const EvalReport* report = nullptr);

/// Rows (estimator, a, w, sigma2, factor, degenerate, expansion).
Table diagnostics_table(const std::vector<EstimatorSpec>& specs,
                        const std::vector<PipelineFit>& fits);

}  // namespace dshrink
