#include "dshrink/shrinkage.hpp"

#include "dshrink/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace dshrink {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

}  // namespace

std::string_view to_string(ShrinkageVariant v) {
  switch (v) {
    case ShrinkageVariant::SL: return "SL";
    case ShrinkageVariant::PRSL: return "PRSL";
    case ShrinkageVariant::SL2: return "SL2";
    case ShrinkageVariant::SL3Sqrt: return "SL3_SQRT";
    case ShrinkageVariant::SL3Log: return "SL3_LOG";
  }
  return "?";
}

ShrinkageVariant parse_variant(std::string_view name) {
  const std::string key = upper(name);
  for (const auto v : kAllVariants) {
    if (to_string(v) == key) return v;
  }
  throw ConfigError("unknown shrinkage variant '" + std::string(name) + "'");
}

std::string_view to_string(Estimator e) {
  if (e == Estimator::Lasso) return "LASSO";
  return to_string(*as_variant(e));
}

Estimator parse_estimator(std::string_view name) {
  if (upper(name) == "LASSO") return Estimator::Lasso;
  return as_estimator(parse_variant(name));
}

std::optional<ShrinkageVariant> as_variant(Estimator e) {
  switch (e) {
    case Estimator::Lasso: return std::nullopt;
    case Estimator::SL: return ShrinkageVariant::SL;
    case Estimator::PRSL: return ShrinkageVariant::PRSL;
    case Estimator::SL2: return ShrinkageVariant::SL2;
    case Estimator::SL3Sqrt: return ShrinkageVariant::SL3Sqrt;
    case Estimator::SL3Log: return ShrinkageVariant::SL3Log;
  }
  return std::nullopt;
}

Estimator as_estimator(ShrinkageVariant v) {
  switch (v) {
    case ShrinkageVariant::SL: return Estimator::SL;
    case ShrinkageVariant::PRSL: return Estimator::PRSL;
    case ShrinkageVariant::SL2: return Estimator::SL2;
    case ShrinkageVariant::SL3Sqrt: return Estimator::SL3Sqrt;
    case ShrinkageVariant::SL3Log: return Estimator::SL3Log;
  }
  return Estimator::Lasso;
}

double stein_constant(Index n, Index p) {
  if (p < 3) {
    throw DomainError("Stein shrinkage needs p >= 3 (got p = " + std::to_string(p) +
                      "); below three dimensions no positive constant improves the risk");
  }
  if (n <= p) {
    throw DomainError("Stein constant needs n > p (got n = " + std::to_string(n) +
                      ", p = " + std::to_string(p) + ")");
  }
  const auto num = static_cast<double>((n - p) * (p - 2));
  const auto den = static_cast<double>(n - p + 2);
  return num / den;
}

Sigma2Estimate sigma2_hat(const StandardizedDataset& sd) {
  const Index n = sd.n();
  const Index p = sd.p();
  if (n <= p) {
    throw DomainError("residual variance needs n > p (got n = " + std::to_string(n) +
                      ", p = " + std::to_string(p) + ")");
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sd.xc);
  const Vector beta = cod.solve(sd.yc);
  const double rss = (sd.yc - sd.xc * beta).squaredNorm();
  Sigma2Estimate out;
  out.rank = cod.rank();
  out.rank_deficient = out.rank < p;
  out.value = rss / static_cast<double>(n - p);
  return out;
}

double wn_statistic(const Vector& slopes, const Matrix& g, double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("W statistic needs sigma2 > 0");
  if (g.rows() != slopes.size() || g.cols() != slopes.size()) {
    throw DataError("Gram matrix and slope vector dimensions disagree");
  }
  const double q = slopes.dot(g * slopes);
  return std::max(0.0, q) / sigma2;
}

double wn_statistic(const LassoFit& fit, const Matrix& g, double sigma2) {
  return wn_statistic(fit.slopes, g, sigma2);
}

SteinInputs stein_inputs(const StandardizedDataset& sd, const LassoFit& fit) {
  SteinInputs in;
  in.n = sd.n();
  in.p = sd.p();
  in.a = stein_constant(in.n, in.p);
  const Sigma2Estimate s2 = sigma2_hat(sd);
  in.sigma2 = s2.value;
  in.rank_deficient = s2.rank_deficient;
  if (!(in.sigma2 > 0.0)) {
    throw NumericalError("residual variance is zero; W statistic is undefined");
  }
  in.w = wn_statistic(fit, gram(sd), in.sigma2);
  return in;
}

double shrinkage_factor(ShrinkageVariant variant, double a, double w) {
  if (variant == ShrinkageVariant::SL2) return 1.0 - a / (w + 1.0);
  if (w == 0.0) return 0.0;
  switch (variant) {
    case ShrinkageVariant::SL: return 1.0 - a / w;
    case ShrinkageVariant::PRSL: return std::max(0.0, 1.0 - a / w);
    case ShrinkageVariant::SL3Sqrt: return 1.0 - a * std::sqrt(w) / w;
    case ShrinkageVariant::SL3Log: return 1.0 - a * std::log(std::abs(w)) / w;
    case ShrinkageVariant::SL2: break;
  }
  return 1.0;
}

ShrunkenFit shrink(const LassoFit& fit, ShrinkageVariant variant, const SteinInputs& inputs) {
  if (inputs.w < 0.0 || inputs.a < 0.0) throw DomainError("a and W must be non-negative");
  ShrunkenFit out;
  out.base = fit;
  out.variant = variant;
  out.inputs = inputs;
  out.degenerate_w = inputs.w == 0.0 && variant != ShrinkageVariant::SL2;
  out.factor = shrinkage_factor(variant, inputs.a, inputs.w);
  out.expansion = out.factor > 1.0;
  out.slopes = out.factor * fit.slopes;
  return out;
}

namespace {

Vector stein_g(const Vector& b, const Matrix& g, double sigma2, double a) {
  return -(a * sigma2 / b.dot(g * b)) * b;
}

}  // namespace

double stein_condition_value(const Vector& slopes, const Matrix& g, double sigma2, double a,
                             double step) {
  if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
  if (!(sigma2 > 0.0)) throw DomainError("stein condition needs sigma2 > 0");
  if (g.rows() != slopes.size() || g.cols() != slopes.size()) {
    throw DataError("Gram matrix and slope vector dimensions disagree");
  }
  if (!(slopes.dot(g * slopes) > 0.0)) {
    throw DomainError("stein condition is singular at W = 0");
  }
  const Vector center = stein_g(slopes, g, sigma2, a);
  double divergence = 0.0;
  Vector probe = slopes;
  for (Index i = 0; i < slopes.size(); ++i) {
    probe(i) = slopes(i) + step;
    const double up = stein_g(probe, g, sigma2, a)(i);
    probe(i) = slopes(i) - step;
    const double down = stein_g(probe, g, sigma2, a)(i);
    probe(i) = slopes(i);
    divergence += (up - down) / (2.0 * step);
  }
  return center.squaredNorm() + 2.0 * divergence;
}

double stein_condition_value(const LassoFit& fit, const Matrix& g, double sigma2, double a,
                             double step) {
  return stein_condition_value(fit.slopes, g, sigma2, a, step);
}

}  // namespace dshrink
