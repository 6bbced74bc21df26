#pragma once

#include "dshrink/core_model.hpp"

#include <optional>
#include <span>
#include <vector>

namespace dshrink {

/// Penalty and stopping rule for the coordinate-descent solver. The objective
/// is the unnormalized form  ||yc - Xc b||^2 + lambda * ||b||_1.
struct LassoConfig {
  double lambda = 0.0;
  /// Stop when the largest coefficient change in a sweep is below tol and the
  /// KKT residual (in gradient units of the objective) is below tol.
  double tol = 1e-7;
  int max_sweeps = 10'000;
  /// Keep the objective value after every sweep in LassoFit::objective_trace.
  bool record_trace = false;

  void validate() const;
};

struct LassoFit {
  Vector slopes;
  double lambda = 0.0;
  int sweeps_used = 0;
  bool converged = false;
  double objective = 0.0;
  double kkt_violation = 0.0;
  std::vector<double> objective_trace;
};

/// One grid point of a regularization path.
struct PathPoint {
  double lambda = 0.0;
  LassoFit fit;
  double s = 0.0;
};

/// Fits along a strictly decreasing lambda grid. `reference_norm` is the L1
/// norm of the last (least penalized) fit and is the denominator of every s.
struct LassoPath {
  std::vector<PathPoint> points;
  double reference_norm = 0.0;
};

struct PathSettings {
  int count = 100;
  double ratio = 1e-3;
};

/// A fit located by standardized bound rather than by lambda.
struct BoundFit {
  LassoFit fit;
  double s = 0.0;
  double reference_norm = 0.0;
};

/// Cross products reused by every fit on the same data.
struct LassoGram {
  Matrix xtx;
  Vector xty;

  static LassoGram of(const StandardizedDataset& sd);
};

/// sign(z) * max(|z| - t, 0).
double soft_threshold(double z, double t);

double lasso_objective(const StandardizedDataset& sd, const Vector& slopes, double lambda);

/// Largest violation of the subgradient optimality conditions at `slopes`.
double kkt_violation(const StandardizedDataset& sd, const Vector& slopes, double lambda);

/// Cyclic coordinate descent. Non-convergence is reported through
/// LassoFit::converged; a warm start of the wrong length throws DataError.
LassoFit fit_lasso(const StandardizedDataset& sd, const LassoConfig& cfg,
                   const std::optional<Vector>& warm_start = std::nullopt);

/// Same as above with precomputed cross products of `sd`.
LassoFit fit_lasso(const StandardizedDataset& sd, const LassoGram& gram, const LassoConfig& cfg,
                   const std::optional<Vector>& warm_start = std::nullopt);

/// Smallest lambda with an all-zero solution: 2 * max_j |Xcᵀ yc|_j.
double lambda_max(const StandardizedDataset& sd);

/// `count` values log-spaced from lambda_max down to ratio * lambda_max.
std::vector<double> lambda_grid(const StandardizedDataset& sd, int count, double ratio);

/// Warm-started fits over `grid` (must be strictly decreasing). cfg.lambda is
/// ignored.
LassoPath compute_path(const StandardizedDataset& sd, std::span<const double> grid,
                       const LassoConfig& cfg);

/// ||slopes||_1 / reference_norm, or 0 when reference_norm is 0.
double s_value(const LassoFit& fit, double reference_norm);

/// Fit whose standardized bound equals `s` (within 1e-10), found by bisection
/// on lambda between the bracketing grid points of `path`.
BoundFit fit_at_bound(const StandardizedDataset& sd, const LassoPath& path, double s,
                      const LassoConfig& cfg);
BoundFit fit_at_bound(const StandardizedDataset& sd, const LassoGram& gram, const LassoPath& path,
                      double s, const LassoConfig& cfg);

/// Convenience overload building the path with `settings` first.
BoundFit fit_at_bound(const StandardizedDataset& sd, double s, const PathSettings& settings,
                      const LassoConfig& cfg);

}  // namespace dshrink
