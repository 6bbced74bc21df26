#include "dshrink/errors.hpp"
#include "dshrink/lasso.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace dshrink;

TEST_CASE("soft_threshold") {
  CHECK(soft_threshold(3, 1) == 2);
  CHECK(soft_threshold(-0.5, 1) == 0);
  CHECK(soft_threshold(-3, 1) == -2);
  CHECK(soft_threshold(1, 1) == 0);
}

TEST_CASE("zero penalty reproduces least squares") {
  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const auto sd = standardize(dshrink::testing::random_dataset(40, 5, rng), true);
    LassoConfig cfg;
    cfg.lambda = 0.0;
    cfg.tol = 1e-10;
    const LassoFit fit = fit_lasso(sd, cfg);
    const Vector ols = sd.xc.colPivHouseholderQr().solve(sd.yc);
    CHECK(fit.converged);
    CHECK((fit.slopes - ols).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("penalty at lambda_max gives exact zeros") {
  Rng rng(12);
  const auto sd = standardize(dshrink::testing::random_dataset(30, 6, rng), true);
  LassoConfig cfg;
  cfg.lambda = lambda_max(sd);
  const LassoFit fit = fit_lasso(sd, cfg);
  CHECK(fit.slopes.cwiseAbs().maxCoeff() == 0.0);
  cfg.lambda = 0.999 * lambda_max(sd);
  CHECK(fit_lasso(sd, cfg).slopes.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("orthonormal design matches the closed form") {
  Rng rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const Index p = 1 + rep % 6;
    const auto sd = dshrink::testing::orthonormal_problem(25, p, rng);
    LassoConfig cfg;
    cfg.lambda = u(rng) * lambda_max(sd);
    const LassoFit fit = fit_lasso(sd, cfg);
    const Vector ols = sd.xc.transpose() * sd.yc;
    for (Index j = 0; j < p; ++j) {
      CHECK(std::abs(fit.slopes(j) - soft_threshold(ols(j), cfg.lambda / 2)) < 1e-8);
    }
  }
}

TEST_CASE("objective never increases across sweeps") {
  Rng rng(14);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix x = dshrink::testing::normal_matrix(30, 8, rng);
    x.col(1) = x.col(0) + 0.05 * x.col(1);  // correlated pair slows descent
    const Vector y = x.col(0) + dshrink::testing::normal_vector(30, rng);
    const auto sd = standardize(Dataset(y, x, dshrink::testing::names(8)), true);
    LassoConfig cfg;
    cfg.lambda = 0.05 * lambda_max(sd);
    cfg.record_trace = true;
    const LassoFit fit = fit_lasso(sd, cfg);
    REQUIRE(fit.objective_trace.size() == static_cast<std::size_t>(fit.sweeps_used));
    for (std::size_t k = 1; k < fit.objective_trace.size(); ++k) {
      CHECK(fit.objective_trace[k] <= fit.objective_trace[k - 1] * (1 + 1e-12));
    }
    CHECK(fit.converged);
    CHECK(fit.kkt_violation <= 10 * cfg.tol);
  }
}

TEST_CASE("non-convergence is reported, not raised") {
  Rng rng(15);
  const auto sd = standardize(dshrink::testing::random_dataset(30, 8, rng), true);
  LassoConfig cfg;
  cfg.lambda = 0.01 * lambda_max(sd);
  cfg.max_sweeps = 1;
  cfg.tol = 1e-14;
  const LassoFit fit = fit_lasso(sd, cfg);
  CHECK_FALSE(fit.converged);
  CHECK(fit.sweeps_used == 1);
}

TEST_CASE("warm start of the wrong length throws") {
  Rng rng(16);
  const auto sd = standardize(dshrink::testing::random_dataset(10, 3, rng), true);
  CHECK_THROWS_AS(fit_lasso(sd, LassoConfig{}, Vector::Zero(2)), DataError);
}

TEST_CASE("invalid configurations are rejected") {
  Rng rng(17);
  const auto sd = standardize(dshrink::testing::random_dataset(10, 3, rng), true);
  LassoConfig cfg;
  cfg.lambda = -1;
  CHECK_THROWS_AS(fit_lasso(sd, cfg), ConfigError);
  cfg.lambda = 1;
  cfg.tol = 0;
  CHECK_THROWS_AS(fit_lasso(sd, cfg), ConfigError);
  CHECK_THROWS_AS(lambda_grid(sd, 1, 0.1), ConfigError);
  CHECK_THROWS_AS(lambda_grid(sd, 10, 1.0), ConfigError);
}

TEST_CASE("no grid point beats the solver for p <= 2") {
  Rng rng(18);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const Index p = 1 + rep % 2;
    const auto sd = standardize(dshrink::testing::random_dataset(15, p, rng), rep % 3 == 0);
    LassoConfig cfg;
    cfg.lambda = u(rng) * lambda_max(sd);
    const LassoFit fit = fit_lasso(sd, cfg);
    const Vector ols = sd.xc.colPivHouseholderQr().solve(sd.yc);
    const double half = 1.5 * ols.cwiseAbs().maxCoeff() + 0.1;
    Vector b = Vector::Zero(p);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 200; ++i) {
      b(0) = -half + 2 * half * i / 200.0;
      for (int k = 0; k <= (p == 2 ? 200 : 0); ++k) {
        if (p == 2) b(1) = -half + 2 * half * k / 200.0;
        best = std::min(best, lasso_objective(sd, b, cfg.lambda));
      }
    }
    CHECK(best >= fit.objective - 1e-6);
  }
}

TEST_CASE("lambda grid endpoints") {
  Rng rng(19);
  const auto sd = standardize(dshrink::testing::random_dataset(20, 3, rng), true);
  const auto grid = lambda_grid(sd, 2, 0.1);
  REQUIRE(grid.size() == 2);
  CHECK(grid[0] == lambda_max(sd));
  CHECK(grid[1] == doctest::Approx(0.1 * lambda_max(sd)).epsilon(1e-15));
  const LassoPath path = compute_path(sd, grid, LassoConfig{});
  CHECK(path.points[0].fit.slopes.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-point path at lambda_max has s = 0") {
  Rng rng(20);
  const auto sd = standardize(dshrink::testing::random_dataset(20, 3, rng), true);
  const std::vector<double> grid{lambda_max(sd)};
  const LassoPath path = compute_path(sd, grid, LassoConfig{});
  REQUIRE(path.points.size() == 1);
  CHECK(path.points[0].s == 0.0);
  CHECK(path.reference_norm == 0.0);
}

TEST_CASE("non-decreasing grids are rejected") {
  Rng rng(21);
  const auto sd = standardize(dshrink::testing::random_dataset(20, 3, rng), true);
  const std::vector<double> grid{1.0, 1.0};
  CHECK_THROWS_AS(compute_path(sd, grid, LassoConfig{}), ConfigError);
}

TEST_CASE("s is non-decreasing along random paths") {
  Rng rng(22);
  for (int rep = 0; rep < 10; ++rep) {
    const auto sd = standardize(dshrink::testing::random_dataset(30, 6, rng), true);
    const LassoPath path = compute_path(sd, lambda_grid(sd, 50, 1e-3), LassoConfig{});
    CHECK(path.points.back().s == 1.0);
    for (std::size_t k = 1; k < path.points.size(); ++k) {
      CHECK(path.points[k].s >= path.points[k - 1].s - 1e-9);
    }
  }
}

TEST_CASE("s_value conventions") {
  LassoFit f;
  f.slopes = Vector::Zero(3);
  CHECK(s_value(f, 2.0) == 0.0);
  f.slopes << 1, -1, 0;
  CHECK(s_value(f, 2.0) == 1.0);
  CHECK(s_value(f, 0.0) == 0.0);
}

TEST_CASE("prostate path: lcavol enters first and the support grows") {
  const auto sd = standardize(dshrink::testing::prostate(), true);
  const LassoPath path = compute_path(sd, lambda_grid(sd, 100, 1e-3), LassoConfig{});
  std::size_t first = 0;
  while (path.points[first].fit.slopes.cwiseAbs().maxCoeff() == 0.0) ++first;
  const Vector& entry = path.points[first].fit.slopes;
  CHECK(entry(0) != 0.0);
  CHECK((entry.array() != 0.0).count() == 1);
  Index previous = 0;
  int shrinks = 0;
  for (const auto& pt : path.points) {
    const Index support = (pt.fit.slopes.array() != 0.0).count();
    if (support < previous) ++shrinks;
    previous = support;
  }
  CHECK(shrinks == 0);
  CHECK((path.points.back().fit.slopes.array() != 0.0).count() == 8);
}

TEST_CASE("fit_at_bound hits the requested bound") {
  const auto sd = standardize(dshrink::testing::prostate(), true);
  const LassoPath path = compute_path(sd, lambda_grid(sd, 100, 1e-3), LassoConfig{});
  for (const double s : {0.1, 0.44, 0.8}) {
    const BoundFit bf = fit_at_bound(sd, path, s, LassoConfig{});
    CHECK(bf.s == doctest::Approx(s).epsilon(1e-8));
    CHECK(bf.fit.kkt_violation <= 10 * LassoConfig{}.tol);
  }
  CHECK(fit_at_bound(sd, path, -1.0, LassoConfig{}).s == 0.0);
  CHECK(fit_at_bound(sd, path, 2.0, LassoConfig{}).s == 1.0);
}
