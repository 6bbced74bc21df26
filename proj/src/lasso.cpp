#include "dshrink/lasso.hpp"

#include "dshrink/errors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace dshrink {

void LassoConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must be a finite non-negative number");
  }
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (max_sweeps < 1) throw ConfigError("max_sweeps must be at least 1");
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double lasso_objective(const StandardizedDataset& sd, const Vector& slopes, double lambda) {
  return (sd.yc - sd.xc * slopes).squaredNorm() + lambda * slopes.lpNorm<1>();
}

namespace {

// xr holds Xcᵀ r; the gradient of the squared loss is -2 xr.
double kkt_from_gradient(const Vector& xr, const Vector& b, double lambda) {
  double worst = 0.0;
  for (Index j = 0; j < xr.size(); ++j) {
    const double grad = -2.0 * xr(j);
    double v;
    if (b(j) > 0.0) {
      v = std::abs(grad + lambda);
    } else if (b(j) < 0.0) {
      v = std::abs(grad - lambda);
    } else {
      v = std::max(0.0, std::abs(grad) - lambda);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

double kkt_violation(const StandardizedDataset& sd, const Vector& slopes, double lambda) {
  const Vector r = sd.yc - sd.xc * slopes;
  return kkt_from_gradient(sd.xc.transpose() * r, slopes, lambda);
}

LassoGram LassoGram::of(const StandardizedDataset& sd) {
  LassoGram g;
  g.xtx = gram(sd);
  g.xty = sd.xc.transpose() * sd.yc;
  return g;
}

LassoFit fit_lasso(const StandardizedDataset& sd, const LassoConfig& cfg,
                   const std::optional<Vector>& warm_start) {
  return fit_lasso(sd, LassoGram::of(sd), cfg, warm_start);
}

LassoFit fit_lasso(const StandardizedDataset& sd, const LassoGram& gram, const LassoConfig& cfg,
                   const std::optional<Vector>& warm_start) {
  cfg.validate();
  const Matrix& g = gram.xtx;
  const Index p = sd.p();
  if (warm_start && warm_start->size() != p) {
    throw DataError("warm start has length " + std::to_string(warm_start->size()) +
                    ", expected " + std::to_string(p));
  }
  if (g.rows() != p || gram.xty.size() != p) throw DataError("cross products do not match data");

  Vector b = warm_start ? *warm_start : Vector::Zero(p);
  // xr = Xcᵀ(yc - Xc b), kept current under every coordinate move.
  Vector xr = gram.xty - g * b;
  const double half_penalty = 0.5 * cfg.lambda;
  const auto objective = [&] { return lasso_objective(sd, b, cfg.lambda); };

  LassoFit fit;
  fit.lambda = cfg.lambda;
#ifndef NDEBUG
  double previous = objective();
#endif

  // Sweeps alternate between all coordinates and, once a full sweep has
  // moved something, only the nonzero ones until those settle.
  std::vector<Index> active;
  active.reserve(static_cast<std::size_t>(p));
  bool full_sweep = true;
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    double max_change = 0.0;
    const auto update = [&](Index j) {
      const double old = b(j);
      const double cjj = g(j, j);
      double updated = 0.0;
      if (cjj > 0.0) updated = soft_threshold(xr(j) + cjj * old, half_penalty) / cjj;
      if (updated != old) {
        xr.noalias() -= (updated - old) * g.col(j);
        b(j) = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    };
    if (full_sweep) {
      for (Index j = 0; j < p; ++j) update(j);
    } else {
      for (const Index j : active) update(j);
    }
    fit.sweeps_used = sweep;

    if (cfg.record_trace) fit.objective_trace.push_back(objective());
#ifndef NDEBUG
    {
      const double current = objective();
      assert(current <= previous + 1e-9 * (1.0 + std::abs(previous)));
      previous = current;
    }
#endif

    if (!full_sweep) {
      // Active coordinates settled: confirm with a sweep over everything.
      if (max_change <= cfg.tol) full_sweep = true;
      continue;
    }
    if (max_change <= cfg.tol) {
      xr = gram.xty - g * b;
      if (kkt_from_gradient(xr, b, cfg.lambda) <= cfg.tol) {
        fit.converged = true;
        break;
      }
    }
    active.clear();
    for (Index j = 0; j < p; ++j) {
      if (b(j) != 0.0) active.push_back(j);
    }
    full_sweep = active.empty() || static_cast<Index>(active.size()) == p;
  }

  fit.slopes = std::move(b);
  fit.objective = lasso_objective(sd, fit.slopes, cfg.lambda);
  fit.kkt_violation = kkt_violation(sd, fit.slopes, cfg.lambda);
  return fit;
}

double lambda_max(const StandardizedDataset& sd) {
  return 2.0 * (sd.xc.transpose() * sd.yc).cwiseAbs().maxCoeff();
}

std::vector<double> lambda_grid(const StandardizedDataset& sd, int count, double ratio) {
  if (count < 2) throw ConfigError("lambda grid needs at least 2 points");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("lambda grid ratio must lie in (0, 1)");
  const double top = lambda_max(sd);
  if (!(top > 0.0)) {
    throw DomainError("lambda_max is zero: the response is uncorrelated with every column");
  }
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double log_ratio = std::log(ratio);
  for (int k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(count - 1);
    grid[static_cast<std::size_t>(k)] = top * std::exp(t * log_ratio);
  }
  grid.front() = top;
  grid.back() = top * ratio;
  return grid;
}

double s_value(const LassoFit& fit, double reference_norm) {
  if (reference_norm <= 0.0) return 0.0;
  return fit.slopes.lpNorm<1>() / reference_norm;
}

LassoPath compute_path(const StandardizedDataset& sd, std::span<const double> grid,
                       const LassoConfig& cfg) {
  if (grid.empty()) throw ConfigError("lambda grid is empty");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] < grid[k - 1])) throw ConfigError("lambda grid must be strictly decreasing");
  }
  LassoPath path;
  path.points.reserve(grid.size());
  const LassoGram gram = LassoGram::of(sd);
  LassoConfig step = cfg;
  std::optional<Vector> warm;
  for (const double lambda : grid) {
    step.lambda = lambda;
    LassoFit fit = fit_lasso(sd, gram, step, warm);
    warm = fit.slopes;
    path.points.push_back(PathPoint{lambda, std::move(fit), 0.0});
  }
  path.reference_norm = path.points.back().fit.slopes.lpNorm<1>();
  for (auto& pt : path.points) pt.s = s_value(pt.fit, path.reference_norm);
  return path;
}

BoundFit fit_at_bound(const StandardizedDataset& sd, const LassoPath& path, double s,
                      const LassoConfig& cfg) {
  return fit_at_bound(sd, LassoGram::of(sd), path, s, cfg);
}

BoundFit fit_at_bound(const StandardizedDataset& sd, const LassoGram& gram, const LassoPath& path,
                      double s, const LassoConfig& cfg) {
  if (path.points.empty()) throw ConfigError("empty path");
  if (!std::isfinite(s)) throw ConfigError("standardized bound must be finite");
  const auto& pts = path.points;
  const auto make = [&](const LassoFit& f) {
    return BoundFit{f, s_value(f, path.reference_norm), path.reference_norm};
  };
  if (s <= pts.front().s) return make(pts.front().fit);
  if (s >= pts.back().s) return make(pts.back().fit);

  std::size_t k = 1;
  while (pts[k].s < s) ++k;
  if (pts[k].s == s) return make(pts[k].fit);

  // pts[k-1].s < s < pts[k].s; larger lambda gives the smaller bound.
  double lam_large = pts[k - 1].lambda;
  double lam_small = pts[k].lambda;
  LassoConfig step = cfg;
  LassoFit best = pts[k].fit;
  double best_gap = pts[k].s - s;
  Vector warm = pts[k].fit.slopes;
  for (int iter = 0; iter < 200 && lam_large / lam_small - 1.0 > 1e-13; ++iter) {
    step.lambda = std::sqrt(lam_large * lam_small);
    LassoFit mid = fit_lasso(sd, gram, step, warm);
    const double s_mid = s_value(mid, path.reference_norm);
    const double gap = std::abs(s_mid - s);
    warm = mid.slopes;
    if (gap < best_gap) {
      best_gap = gap;
      best = mid;
    }
    if (gap <= 1e-10) break;
    if (s_mid < s) {
      lam_large = step.lambda;
    } else {
      lam_small = step.lambda;
    }
  }
  return make(best);
}

BoundFit fit_at_bound(const StandardizedDataset& sd, double s, const PathSettings& settings,
                      const LassoConfig& cfg) {
  const auto grid = lambda_grid(sd, settings.count, settings.ratio);
  const LassoPath path = compute_path(sd, grid, cfg);
  return fit_at_bound(sd, path, s, cfg);
}

}  // namespace dshrink
