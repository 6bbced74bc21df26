#include "dshrink/simulation.hpp"

#include "dshrink/errors.hpp"
#include "dshrink/evaluation.hpp"
#include "dshrink/parallel.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <random>

namespace dshrink {

std::string_view to_string(LambdaRuleKind k) {
  switch (k) {
    case LambdaRuleKind::CvMin: return "cv-min";
    case LambdaRuleKind::CvOneSe: return "cv-1se";
    case LambdaRuleKind::Fixed: return "fixed";
  }
  return "?";
}

LambdaRuleKind parse_lambda_rule(std::string_view name) {
  for (const auto k : {LambdaRuleKind::CvMin, LambdaRuleKind::CvOneSe, LambdaRuleKind::Fixed}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown lambda rule '" + std::string(name) + "'");
}

std::string_view to_string(SelectionScope s) {
  return s == SelectionScope::PerReplication ? "per-replication" : "per-configuration";
}

SelectionScope parse_selection_scope(std::string_view name) {
  if (name == "per-replication") return SelectionScope::PerReplication;
  if (name == "per-configuration") return SelectionScope::PerConfiguration;
  throw ConfigError("unknown selection scope '" + std::string(name) + "'");
}

std::string LambdaRule::describe() const {
  if (kind == LambdaRuleKind::Fixed) return "fixed lambda=" + format_double(fixed_lambda);
  return std::string(to_string(kind)) + " " + std::to_string(folds) + "-fold over " +
         std::to_string(grid_count) + " lambdas (ratio " + format_double(grid_ratio) + "), " +
         std::string(to_string(scope));
}

void SimConfig::validate() const {
  if (!(p >= 3 && n > p)) throw ConfigError("simulation needs n > p >= 3");
  if (!(r2_max > 0.0 && r2_max < 1.0)) throw ConfigError("r2_max must lie in (0, 1)");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (grid_points < 2) throw ConfigError("grid_points must be at least 2");
  if (replications < 1) throw ConfigError("replications must be at least 1");
  if (lambda_rule.kind != LambdaRuleKind::Fixed) {
    if (lambda_rule.folds < 2 || static_cast<Index>(lambda_rule.folds) > n) {
      throw ConfigError("lambda rule folds must lie in [2, n]");
    }
    if (lambda_rule.grid_count < 2) throw ConfigError("lambda grid needs at least 2 points");
    if (!(lambda_rule.grid_ratio > 0.0 && lambda_rule.grid_ratio < 1.0)) {
      throw ConfigError("lambda grid ratio must lie in (0, 1)");
    }
  } else if (!(lambda_rule.fixed_lambda >= 0.0)) {
    throw ConfigError("fixed lambda must be non-negative");
  }
  solver.validate();
}

double c_from_r2(double r2) {
  if (!(r2 >= 0.0 && r2 < 1.0)) throw DomainError("population R^2 must lie in [0, 1)");
  return std::sqrt(r2 / (1.0 - r2));
}

Vector coefficients_from_alpha(Index p, double alpha, double c) {
  Vector beta(p);
  const double scale = c * std::sqrt(2.0 * alpha);
  for (Index j = 0; j < p; ++j) {
    beta(j) = scale * std::pow(static_cast<double>(j + 1), -alpha / 2.0);
  }
  return beta;
}

Dataset generate_replication(Index n, const Vector& beta, Rng& rng) {
  const Index p = beta.size();
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) x(i, j) = normal(rng);
  }
  Vector y = x * beta;
  for (Index i = 0; i < n; ++i) y(i) += normal(rng);
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return Dataset(std::move(y), std::move(x), std::move(names));
}

std::vector<double> r2_grid(double r2_max, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    grid[static_cast<std::size_t>(k)] =
        r2_max * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  grid.back() = r2_max;
  return grid;
}

namespace {

constexpr std::array<Estimator, 6> kInternalOrder = {Estimator::Lasso,   Estimator::SL,
                                                     Estimator::PRSL,    Estimator::SL2,
                                                     Estimator::SL3Sqrt, Estimator::SL3Log};

struct ReplicationOutcome {
  std::array<double, kInternalOrder.size()> loss{};
  double lambda = 0.0;
  bool converged = true;
  bool degenerate_w = false;
};

double select_lambda(const Dataset& data, const StandardizedDataset& sd, const SimConfig& cfg,
                     std::uint64_t fold_seed) {
  const LambdaRule& rule = cfg.lambda_rule;
  if (rule.kind == LambdaRuleKind::Fixed) return rule.fixed_lambda;
  const auto grid = lambda_grid(sd, rule.grid_count, rule.grid_ratio);
  const FoldPlan plan = kfold_split(data.n(), rule.folds, fold_seed);
  const auto curve = cv_curve_lambdas(data, grid, plan, cfg.scale_columns, cfg.solver);
  if (rule.kind == LambdaRuleKind::CvMin) return grid[cv_min_index(curve)];
  const LassoPath path = compute_path(sd, grid, cfg.solver);
  return one_se_rule(path, curve).lambda;
}

ReplicationOutcome run_replication(const SimConfig& cfg, const Vector& beta, std::size_t g,
                                   std::size_t r, const double* fixed_lambda) {
  Rng rng = make_stream(cfg.seed, {g, r, 0});
  const Dataset data = generate_replication(cfg.n, beta, rng);
  const StandardizedDataset sd = standardize(data, cfg.scale_columns);

  ReplicationOutcome out;
  out.lambda = fixed_lambda ? *fixed_lambda
                            : select_lambda(data, sd, cfg, derive_seed(cfg.seed, {g, r, 1}));
  LassoConfig solver = cfg.solver;
  solver.lambda = out.lambda;
  const LassoFit fit = fit_lasso(sd, solver);
  out.converged = fit.converged;

  const SteinInputs inputs = stein_inputs(sd, fit);
  out.degenerate_w = inputs.w == 0.0;
  for (std::size_t e = 0; e < kInternalOrder.size(); ++e) {
    const auto variant = as_variant(kInternalOrder[e]);
    const Vector slopes = variant ? shrink(fit, *variant, inputs).slopes : fit.slopes;
    out.loss[e] = (destandardize(slopes, sd).slopes - beta).squaredNorm();
  }
  return out;
}

std::size_t internal_index(Estimator e) {
  for (std::size_t k = 0; k < kInternalOrder.size(); ++k) {
    if (kInternalOrder[k] == e) return k;
  }
  return 0;
}

}  // namespace

SimResult run_simulation(const SimConfig& cfg) {
  cfg.validate();
  const auto r2s = r2_grid(cfg.r2_max, cfg.grid_points);
  const std::size_t G = r2s.size();
  const auto R = static_cast<std::size_t>(cfg.replications);

  SimResult result;
  result.config = cfg;
  result.lambda_rule = cfg.lambda_rule.describe();
  std::vector<Vector> betas;
  for (const double r2 : r2s) {
    SimGridInfo info;
    info.r2 = r2;
    info.c = c_from_r2(r2);
    betas.push_back(coefficients_from_alpha(cfg.p, cfg.alpha, info.c));
    info.beta_norm2 = betas.back().squaredNorm();
    result.grid.push_back(info);
  }

  // Per-configuration scope: lambda is selected once on replication 0's data.
  std::vector<double> cell_lambda(G, 0.0);
  const bool per_config = cfg.lambda_rule.kind != LambdaRuleKind::Fixed &&
                          cfg.lambda_rule.scope == SelectionScope::PerConfiguration;
  if (per_config) {
    parallel_for(G, cfg.workers, [&](std::size_t g) {
      Rng rng = make_stream(cfg.seed, {g, 0, 0});
      const Dataset data = generate_replication(cfg.n, betas[g], rng);
      const StandardizedDataset sd = standardize(data, cfg.scale_columns);
      cell_lambda[g] = select_lambda(data, sd, cfg, derive_seed(cfg.seed, {g, 0, 1}));
    });
  }

  std::vector<ReplicationOutcome> outcomes(G * R);
  parallel_for(G * R, cfg.workers, [&](std::size_t unit) {
    const std::size_t g = unit / R;
    const std::size_t r = unit % R;
    outcomes[unit] = run_replication(cfg, betas[g], g, r, per_config ? &cell_lambda[g] : nullptr);
  });

  for (std::size_t g = 0; g < G; ++g) {
    std::array<double, kInternalOrder.size()> mean{};
    std::array<double, kInternalOrder.size()> se{};
    double lambda_sum = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      const auto& oc = outcomes[g * R + r];
      for (std::size_t e = 0; e < mean.size(); ++e) mean[e] += oc.loss[e];
      lambda_sum += oc.lambda;
      if (!oc.converged) ++result.grid[g].nonconverged;
      if (oc.degenerate_w) ++result.grid[g].degenerate_w;
    }
    for (auto& m : mean) m /= static_cast<double>(R);
    if (R > 1) {
      for (std::size_t e = 0; e < mean.size(); ++e) {
        double ss = 0.0;
        for (std::size_t r = 0; r < R; ++r) {
          const double d = outcomes[g * R + r].loss[e] - mean[e];
          ss += d * d;
        }
        se[e] = std::sqrt(ss / static_cast<double>(R - 1) / static_cast<double>(R));
      }
    }
    result.grid[g].mean_lambda = lambda_sum / static_cast<double>(R);

    const double lasso_mse = mean[0];
    for (const Estimator est : cfg.estimators) {
      const std::size_t e = internal_index(est);
      SimCell cell;
      cell.r2 = r2s[g];
      cell.estimator = est;
      cell.mse = mean[e];
      cell.mc_se = se[e];
      if (est == Estimator::Lasso) {
        cell.rmse = 1.0;
      } else {
        cell.rmse = lasso_mse > 0.0 ? mean[e] / lasso_mse : 1.0;
      }
      result.cells.push_back(cell);
    }
  }
  return result;
}

Table export_rmse_table(const SimResult& result) {
  Table t;
  t.header = {"r2", "estimator", "mse", "rmse", "mc_se"};
  for (const auto& c : result.cells) {
    t.rows.push_back({format_double(c.r2), std::string(to_string(c.estimator)),
                      format_double(c.mse), format_double(c.rmse), format_double(c.mc_se)});
  }
  return t;
}

std::vector<SimCell> parse_rmse_table(const Table& table) {
  const std::size_t r2 = table.column("r2");
  const std::size_t est = table.column("estimator");
  const std::size_t mse = table.column("mse");
  const std::size_t rmse = table.column("rmse");
  const std::size_t se = table.column("mc_se");
  std::vector<SimCell> cells;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = "row " + std::to_string(i + 1);
    SimCell c;
    c.r2 = parse_double(row[r2], where);
    c.estimator = parse_estimator(row[est]);
    c.mse = parse_double(row[mse], where);
    c.rmse = parse_double(row[rmse], where);
    c.mc_se = parse_double(row[se], where);
    cells.push_back(c);
  }
  return cells;
}

Table export_grid_table(const SimResult& result) {
  Table t;
  t.header = {"r2", "c", "beta_norm2", "nonconverged", "degenerate_w", "mean_lambda"};
  for (const auto& g : result.grid) {
    t.rows.push_back({format_double(g.r2), format_double(g.c), format_double(g.beta_norm2),
                      std::to_string(g.nonconverged), std::to_string(g.degenerate_w),
                      format_double(g.mean_lambda)});
  }
  return t;
}

}  // namespace dshrink
