#pragma once

#include "dshrink/core_model.hpp"
#include "dshrink/lasso.hpp"
#include "dshrink/random.hpp"
#include "dshrink/shrinkage.hpp"
#include "dshrink/table.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dshrink {

enum class LambdaRuleKind { CvMin, CvOneSe, Fixed };
enum class SelectionScope { PerReplication, PerConfiguration };

std::string_view to_string(LambdaRuleKind k);
LambdaRuleKind parse_lambda_rule(std::string_view name);
std::string_view to_string(SelectionScope s);
SelectionScope parse_selection_scope(std::string_view name);

/// How the LASSO penalty is chosen for a simulated dataset.
struct LambdaRule {
  LambdaRuleKind kind = LambdaRuleKind::CvMin;
  SelectionScope scope = SelectionScope::PerReplication;
  int folds = 10;
  int grid_count = 100;
  double grid_ratio = 1e-3;
  double fixed_lambda = 0.0;  // used by Fixed

  std::string describe() const;
};

struct SimConfig {
  Index n = 50;
  Index p = 10;
  double alpha = 0.1;
  double r2_max = 0.5;
  int grid_points = 20;
  int replications = 1000;
  std::uint64_t seed = kDefaultSeed;
  /// Estimators reported in the output. LASSO is always fitted internally as
  /// the RMSE denominator.
  std::vector<Estimator> estimators = {Estimator::Lasso, Estimator::PRSL};
  LambdaRule lambda_rule;
  LassoConfig solver;
  bool scale_columns = false;
  int workers = 1;

  void validate() const;
};

struct SimCell {
  double r2 = 0.0;
  Estimator estimator = Estimator::Lasso;
  double mse = 0.0;
  double rmse = 1.0;
  double mc_se = 0.0;  // Monte Carlo standard error of mse

  friend bool operator==(const SimCell&, const SimCell&) = default;
};

/// Per grid point bookkeeping.
struct SimGridInfo {
  double r2 = 0.0;
  double c = 0.0;
  /// ||beta||^2 actually used; differs from c^2 unless 2*alpha*sum j^-alpha = 1.
  double beta_norm2 = 0.0;
  int nonconverged = 0;
  int degenerate_w = 0;
  double mean_lambda = 0.0;
};

struct SimResult {
  SimConfig config;
  std::vector<SimGridInfo> grid;
  std::vector<SimCell> cells;  // grid-major, estimators in config order
  std::string lambda_rule;
};

/// sqrt(r2 / (1 - r2)).
double c_from_r2(double r2);

/// beta_j = c * sqrt(2 alpha) * j^(-alpha/2), j = 1..p.
Vector coefficients_from_alpha(Index p, double alpha, double c);

/// n rows of i.i.d. N(0,1) covariates and y = X beta + N(0,1) noise.
Dataset generate_replication(Index n, const Vector& beta, Rng& rng);

/// The R^2 grid: `points` values equally spaced on [0, r2_max].
std::vector<double> r2_grid(double r2_max, int points);

SimResult run_simulation(const SimConfig& cfg);

/// Columns r2, estimator, mse, rmse, mc_se.
Table export_rmse_table(const SimResult& result);
std::vector<SimCell> parse_rmse_table(const Table& table);

/// Columns r2, c, beta_norm2, nonconverged, degenerate_w, mean_lambda.
Table export_grid_table(const SimResult& result);

}  // namespace dshrink
