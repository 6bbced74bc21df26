#pragma once

#include "dshrink/core_model.hpp"
#include "dshrink/lasso.hpp"
#include "dshrink/random.hpp"
#include "dshrink/shrinkage.hpp"
#include "dshrink/table.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dshrink {

struct FoldPlan {
  int k = 0;
  std::vector<int> assignment;  // fold index of every row
  std::uint64_t seed = 0;

  std::vector<Index> fold_sizes() const;
  std::vector<Index> train_rows(int fold) const;
  std::vector<Index> test_rows(int fold) const;
};

/// Random permutation of the rows cut into k folds whose sizes differ by at
/// most one. Requires 2 <= k <= n.
FoldPlan kfold_split(Index n, int k, std::uint64_t seed);

/// How the LASSO penalty of a pipeline is specified.
enum class PenaltyKind {
  Lambda,    // fixed lambda on the standardized scale
  Bound,     // fixed standardized bound s, located on the training data's own path
  Baseline,  // no model: predict the training mean
};

/// standardize -> LASSO -> optional shrinkage rule.
struct EstimatorSpec {
  PenaltyKind penalty = PenaltyKind::Bound;
  double value = 0.0;
  Estimator estimator = Estimator::Lasso;
  bool scale_columns = true;
  /// Also scale the centered intercept (the response mean) by the factor.
  bool shrink_intercept = false;
  LassoConfig solver;
  PathSettings path;

  std::string label() const;
};

/// A pipeline fitted on one dataset.
struct PipelineFit {
  StandardizedDataset sd;
  LassoFit lasso;
  double s = 0.0;
  std::optional<SteinInputs> inputs;
  double factor = 1.0;
  bool degenerate = false;  // shrinkage unavailable; fell back to LASSO
  Vector standardized_slopes;
  /// Intercept of the centered model (response mean, times the factor when
  /// the intercept is shrunk).
  double centered_intercept = 0.0;
  CoefficientVector coefficients;  // original units
};

/// Fits every spec on `d`, sharing LASSO fits between specs that differ only
/// in the shrinkage rule.
std::vector<PipelineFit> fit_pipelines(const Dataset& d, std::span<const EstimatorSpec> specs);
PipelineFit fit_pipeline(const Dataset& d, const EstimatorSpec& spec);

struct CvResult {
  double pe_mean = 0.0;  // mean squared error over all held-out rows
  double pe_se = 0.0;    // standard error of the per-fold means
  std::vector<double> fold_pe;
  std::vector<bool> degenerate_folds;
  int degenerate_count = 0;
};

/// K-fold squared prediction error. All standardization and penalty location
/// use training rows only.
std::vector<CvResult> cv_prediction_errors(const Dataset& d, std::span<const EstimatorSpec> specs,
                                           const FoldPlan& plan);
CvResult cv_prediction_error(const Dataset& d, const EstimatorSpec& spec, const FoldPlan& plan);

struct CvPoint {
  double pe_mean = 0.0;
  double pe_se = 0.0;
};

/// CV curve of plain LASSO at each standardized bound in `bounds`.
std::vector<CvPoint> cv_curve_bounds(const Dataset& d, std::span<const double> bounds,
                                     const FoldPlan& plan, bool scale_columns,
                                     const LassoConfig& solver, const PathSettings& path);

/// CV curve of plain LASSO at each lambda of a common grid.
std::vector<CvPoint> cv_curve_lambdas(const Dataset& d, std::span<const double> lambdas,
                                      const FoldPlan& plan, bool scale_columns,
                                      const LassoConfig& solver);

struct ModelSelection {
  std::size_t index = 0;
  double s = 0.0;
  double lambda = 0.0;
};

/// Index with the smallest mean CV error (first on ties).
std::size_t cv_min_index(std::span<const CvPoint> curve);

/// Most parsimonious path point (smallest s) whose CV error is within one
/// standard error of the best point's error.
ModelSelection one_se_rule(const LassoPath& path, std::span<const CvPoint> curve);

struct BootstrapOptions {
  int replicates = 1000;
  std::uint64_t seed = kDefaultSeed;
  int folds = 10;
  int workers = 1;
  /// Re-select s by the one-SE rule inside every replicate instead of using
  /// the spec's fixed value.
  bool reselect_per_replicate = false;
  double max_skip_fraction = 0.01;
};

struct EstimatorReport {
  EstimatorSpec spec;
  std::string label;
  double pe_mean = 0.0;
  double pe_se = 0.0;
  double rpe = 1.0;
  std::vector<double> bootstrap_pe;
  Matrix bootstrap_coefficients;  // replicates x p, original units
  std::vector<double> bootstrap_s;
  double selected_s = 0.0;
};

struct EvalReport {
  std::vector<EstimatorReport> estimators;
  std::vector<std::string> feature_names;
  int replicates_requested = 0;
  int replicates_used = 0;
  int replicates_skipped = 0;
  int degenerate_folds = 0;
  std::vector<int> replicate_ids;  // bootstrap index of each used replicate
};

/// Case-resampling bootstrap; every replicate runs K-fold CV for every spec.
/// RPE is mean PE of a spec over mean PE of plain LASSO with the first spec's
/// penalty. Throws NumericalError when more than max_skip_fraction of the
/// replicates had to be skipped.
EvalReport bootstrap_evaluate(const Dataset& d, std::span<const EstimatorSpec> specs,
                              const BootstrapOptions& options);

/// Rows (estimator, pe_mean, pe_se, rpe).
Table report_table(const EvalReport& report);
/// Long format rows (replicate, estimator, feature, value).
Table coefficient_dump(const EvalReport& report);

}  // namespace dshrink
