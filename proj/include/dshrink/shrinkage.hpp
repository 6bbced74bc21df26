#pragma once

#include "dshrink/core_model.hpp"
#include "dshrink/lasso.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace dshrink {

/// Multiplicative post-LASSO rules. With a = (n-p)(p-2)/(n-p+2) and W the
/// signal statistic, the factors are
///   SL       1 - a/W
///   PRSL     max(0, 1 - a/W)
///   SL2      1 - a/(W+1)
///   SL3Sqrt  1 - a*sqrt(W)/W
///   SL3Log   1 - a*log|W|/W
enum class ShrinkageVariant { SL, PRSL, SL2, SL3Sqrt, SL3Log };

inline constexpr std::array<ShrinkageVariant, 5> kAllVariants = {
    ShrinkageVariant::SL, ShrinkageVariant::PRSL, ShrinkageVariant::SL2,
    ShrinkageVariant::SL3Sqrt, ShrinkageVariant::SL3Log};

std::string_view to_string(ShrinkageVariant v);
/// Accepts the names produced by to_string (case-insensitive).
ShrinkageVariant parse_variant(std::string_view name);

/// A LASSO fit optionally followed by one shrinkage rule.
enum class Estimator { Lasso, SL, PRSL, SL2, SL3Sqrt, SL3Log };

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view name);
std::optional<ShrinkageVariant> as_variant(Estimator e);
Estimator as_estimator(ShrinkageVariant v);

struct SteinInputs {
  double a = 0.0;
  double w = 0.0;
  double sigma2 = 0.0;
  Index n = 0;
  Index p = 0;
  bool rank_deficient = false;
};

struct Sigma2Estimate {
  double value = 0.0;
  Index rank = 0;
  bool rank_deficient = false;
};

struct ShrunkenFit {
  LassoFit base;
  ShrinkageVariant variant = ShrinkageVariant::PRSL;
  double factor = 1.0;
  Vector slopes;
  SteinInputs inputs;
  /// W = 0 made the rule singular; slopes were set to zero.
  bool degenerate_w = false;
  /// factor > 1 (SL3 with log and 0 < W < 1).
  bool expansion = false;
};

/// (n-p)(p-2)/(n-p+2). Requires n > p >= 3.
double stein_constant(Index n, Index p);

/// Residual variance RSS/(n-p) of the least-squares fit on the centered data.
/// Rank-deficient designs use the minimum-norm solution and set the flag.
Sigma2Estimate sigma2_hat(const StandardizedDataset& sd);

/// slopesᵀ G slopes / sigma2.
double wn_statistic(const Vector& slopes, const Matrix& g, double sigma2);
double wn_statistic(const LassoFit& fit, const Matrix& g, double sigma2);

/// a, W and sigma2 for `fit` on `sd`.
SteinInputs stein_inputs(const StandardizedDataset& sd, const LassoFit& fit);

/// Factor of `variant` at (a, w); singular cases (W = 0 for SL, PRSL, SL3)
/// return 0.
double shrinkage_factor(ShrinkageVariant variant, double a, double w);

ShrunkenFit shrink(const LassoFit& fit, ShrinkageVariant variant, const SteinInputs& inputs);

/// ||g(b)||^2 + 2 div g(b) for g(b) = -(a sigma2 / bᵀGb) b, the divergence taken
/// by central differences with step `step`. Negative values satisfy the
/// risk-improvement inequality at b.
double stein_condition_value(const Vector& slopes, const Matrix& g, double sigma2, double a,
                             double step);
double stein_condition_value(const LassoFit& fit, const Matrix& g, double sigma2, double a,
                             double step);

}  // namespace dshrink
