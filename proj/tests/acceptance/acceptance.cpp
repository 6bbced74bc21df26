// Acceptance checks. Each criterion prints one PASS/FAIL line; run a single
// one with --criterion N.

#include "dshrink/errors.hpp"
#include "dshrink/evaluation.hpp"
#include "dshrink/experiments.hpp"
#include "dshrink/lasso.hpp"
#include "dshrink/parallel.hpp"
#include "dshrink/prostate_data.hpp"
#include "dshrink/shrinkage.hpp"
#include "dshrink/simulation.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>

namespace fs = std::filesystem;
using namespace dshrink;
using dshrink::testing::normal_matrix;
using dshrink::testing::normal_vector;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int hardware_workers() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

// 1 ---------------------------------------------------------------------------

Outcome solver_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(derive_seed(kDefaultSeed, {1}));
  std::uniform_real_distribution<double> u(0.0, 1.0);

  double worst_closed_form = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const Index p = 1 + rep % 6;
    const auto sd = dshrink::testing::orthonormal_problem(20 + rep % 30, p, rng);
    LassoConfig cfg;
    cfg.lambda = u(rng) * lambda_max(sd);
    const LassoFit fit = fit_lasso(sd, cfg);
    const Vector z = sd.xc.transpose() * sd.yc;
    for (Index j = 0; j < p; ++j) {
      worst_closed_form =
          std::max(worst_closed_form, std::abs(fit.slopes(j) - soft_threshold(z(j), cfg.lambda / 2)));
    }
  }

  double worst_gap = -std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 50; ++rep) {
    const Index p = 1 + rep % 2;
    const auto sd = standardize(dshrink::testing::random_dataset(10 + rep, p, rng), rep % 2 == 0);
    LassoConfig cfg;
    cfg.lambda = u(rng) * lambda_max(sd);
    const LassoFit fit = fit_lasso(sd, cfg);
    const Vector ols = sd.xc.colPivHouseholderQr().solve(sd.yc);
    const double half = 1.5 * ols.cwiseAbs().maxCoeff() + 0.1;
    Vector b = Vector::Zero(p);
    for (int i = 0; i <= 200; ++i) {
      b(0) = -half + 2 * half * i / 200.0;
      for (int k = 0; k <= (p == 2 ? 200 : 0); ++k) {
        if (p == 2) b(1) = -half + 2 * half * k / 200.0;
        worst_gap = std::max(worst_gap, fit.objective - lasso_objective(sd, b, cfg.lambda));
      }
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst_closed_form <= 1e-8 && worst_gap <= 1e-6 && seconds < 60.0,
          "max |cd - closed form| = " + fmt(worst_closed_form) +
              ", max grid improvement = " + fmt(worst_gap) + ", " + fmt(seconds, 3) + " s"};
}

// 2 ---------------------------------------------------------------------------

Outcome stein_statistics() {
  const double a = stein_constant(50, 10);
  const double expected = 320.0 / 42.0;
  Rng rng(derive_seed(kDefaultSeed, {2}));
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const Index p = 3 + rep % 8;
    const Index n = p + 5 + rep % 20;
    const auto sd = standardize(dshrink::testing::random_dataset(n, p, rng), rep % 2 == 0);
    LassoConfig cfg;
    cfg.lambda = 0.2 * lambda_max(sd);
    const LassoFit fit = fit_lasso(sd, cfg);
    const double s2 = sigma2_hat(sd).value;
    // Brute force: explicit sum over rows of (x_i . b)^2.
    double q = 0.0;
    for (Index i = 0; i < n; ++i) {
      double xb = 0.0;
      for (Index j = 0; j < p; ++j) xb += sd.xc(i, j) * fit.slopes(j);
      q += xb * xb;
    }
    const double w = wn_statistic(fit, gram(sd), s2);
    worst = std::max(worst, std::abs(w - q / s2) / std::max(1.0, q / s2));
  }
  const bool exact = std::abs(a - expected) <= 4 * std::numeric_limits<double>::epsilon() * expected;
  return {exact && worst <= 1e-10,
          "a(50,10) = " + fmt(a, 17) + ", max W deviation = " + fmt(worst)};
}

// 3 ---------------------------------------------------------------------------

Outcome shrinkage_algebra() {
  Rng rng(derive_seed(kDefaultSeed, {3}));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0, below = 0, above = 0, violations = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const Index p = 3 + rep % 10;
    const Index n = p + 3 + static_cast<Index>(u(rng) * 40);
    const auto sd = standardize(dshrink::testing::random_dataset(n, p, rng, 0.5 + 3 * u(rng)), true);
    LassoConfig cfg;
    cfg.lambda = u(rng) * lambda_max(sd);
    const LassoFit fit = fit_lasso(sd, cfg);
    const SteinInputs in = stein_inputs(sd, fit);
    ++checked;
    const ShrunkenFit sl = shrink(fit, ShrinkageVariant::SL, in);
    const ShrunkenFit prsl = shrink(fit, ShrinkageVariant::PRSL, in);
    if (in.w >= in.a) {
      ++above;
      if (prsl.slopes != sl.slopes) ++violations;
    } else {
      ++below;
      if (prsl.slopes.cwiseAbs().maxCoeff() != 0.0) ++violations;
    }
    for (const auto v : kAllVariants) {
      const ShrunkenFit sf = shrink(fit, v, in);
      for (Index j = 0; j < p; ++j) {
        if (fit.slopes(j) == 0.0 && sf.slopes(j) != 0.0) ++violations;
      }
    }
    if (in.w > 0.0) {
      const double f_sl = shrinkage_factor(ShrinkageVariant::SL, in.a, in.w);
      const double f_sl2 = shrinkage_factor(ShrinkageVariant::SL2, in.a, in.w);
      if (!(f_sl < f_sl2 && f_sl2 < 1.0)) ++violations;
    }
  }
  return {violations == 0 && below > 0 && above > 0,
          std::to_string(checked) + " fits (" + std::to_string(below) + " with W < a), " +
              std::to_string(violations) + " violations"};
}

// 4 ---------------------------------------------------------------------------

double cv_min_lambda(const Dataset& d, const StandardizedDataset& sd, std::uint64_t seed) {
  const auto grid = lambda_grid(sd, 100, 1e-3);
  const FoldPlan plan = kfold_split(d.n(), 10, seed);
  const auto curve = cv_curve_lambdas(d, grid, plan, false, LassoConfig{});
  return grid[cv_min_index(curve)];
}

Outcome risk_ordering() {
  constexpr Index n = 50, p = 10;
  constexpr int reps = 2000;
  std::vector<std::pair<std::string, Vector>> betas;
  betas.emplace_back("beta=0", Vector::Zero(p));
  betas.emplace_back("dense", coefficients_from_alpha(p, 0.1, c_from_r2(0.3)));
  Vector sparse = Vector::Zero(p);
  sparse(0) = 1.0;
  sparse(1) = 1.0;
  betas.emplace_back("sparse", sparse);

  bool pass = true;
  std::string detail;
  for (std::size_t c = 0; c < betas.size(); ++c) {
    const Vector& beta = betas[c].second;
    std::vector<double> diff(reps);
    parallel_for(reps, hardware_workers(), [&](std::size_t r) {
      Rng rng = make_stream(kDefaultSeed, {4, c, r, 0});
      const Dataset d = generate_replication(n, beta, rng);
      const auto sd = standardize(d, false);
      LassoConfig cfg;
      cfg.lambda = cv_min_lambda(d, sd, derive_seed(kDefaultSeed, {4, c, r, 1}));
      const LassoFit fit = fit_lasso(sd, cfg);
      const SteinInputs in = stein_inputs(sd, fit);
      const Vector prsl = shrink(fit, ShrinkageVariant::PRSL, in).slopes;
      const Vector sl = shrink(fit, ShrinkageVariant::SL, in).slopes;
      diff[r] = (prsl - beta).squaredNorm() - (sl - beta).squaredNorm();
    });
    double mean = 0.0;
    for (const double x : diff) mean += x;
    mean /= reps;
    double var = 0.0;
    for (const double x : diff) var += (x - mean) * (x - mean);
    const double se = std::sqrt(var / (reps - 1) / reps);
    const bool ok = mean <= 2 * se;
    pass = pass && ok;
    detail += (c ? "; " : "") + betas[c].first + ": mean(PRSL-SL) = " + fmt(mean) +
              " (2SE " + fmt(2 * se) + ")";
  }
  return {pass, detail};
}

// 5 ---------------------------------------------------------------------------

Outcome stein_condition() {
  constexpr Index n = 50, p = 10;
  Rng rng(derive_seed(kDefaultSeed, {5}));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int sampled = 0, above_2a = 0, positive_above = 0;
  double worst = 0.0;
  while (sampled < 100) {
    const auto sd = standardize(dshrink::testing::random_dataset(n, p, rng, 0.5 + 2 * u(rng)), true);
    LassoConfig cfg;
    cfg.lambda = u(rng) * lambda_max(sd);
    const LassoFit fit = fit_lasso(sd, cfg);
    const SteinInputs in = stein_inputs(sd, fit);
    if (in.w == 0.0) continue;
    ++sampled;
    const Matrix g = gram(sd);
    const double q = fit.slopes.dot(g * fit.slopes);
    const double analytic = in.a * in.a * in.sigma2 * in.sigma2 * fit.slopes.squaredNorm() / (q * q) -
                            2 * in.a * in.sigma2 * (p - 2) / q;
    const double step = 1e-5 * fit.slopes.cwiseAbs().maxCoeff();
    const double fd = stein_condition_value(fit, g, in.sigma2, in.a, step);
    worst = std::max(worst, std::abs(fd - analytic) / std::abs(analytic));
    if (in.w > 2 * in.a) {
      ++above_2a;
      if (!(fd < 0.0)) ++positive_above;
    }
  }
  return {worst <= 1e-4 && positive_above == 0 && above_2a > 0,
          "max relative FD error = " + fmt(worst) + ", " + std::to_string(above_2a) +
              " fits with W > 2a, " + std::to_string(positive_above) + " non-negative"};
}

// 6 ---------------------------------------------------------------------------

Outcome simulation_trends() {
  const auto t0 = std::chrono::steady_clock::now();
  SimConfig cfg;
  cfg.n = 50;
  cfg.p = 20;
  cfg.alpha = 0.1;
  cfg.grid_points = 20;
  cfg.replications = 500;
  cfg.estimators = {Estimator::Lasso, Estimator::PRSL};
  cfg.workers = hardware_workers();

  cfg.r2_max = 0.5;
  const SimResult low = run_simulation(cfg);
  bool low_ok = true;
  std::string low_values;
  for (const auto& cell : low.cells) {
    if (cell.estimator != Estimator::PRSL || cell.r2 > 0.1 + 1e-12) continue;
    low_ok = low_ok && cell.rmse < 1.0;
    low_values += (low_values.empty() ? "" : " ") + fmt(cell.rmse, 3);
  }

  cfg.r2_max = 0.8;
  const SimResult high = run_simulation(cfg);
  double top = 0.0;
  for (const auto& cell : high.cells) {
    if (cell.estimator == Estimator::PRSL && cell.r2 == 0.8) top = cell.rmse;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {low_ok && std::abs(top - 1.0) <= 0.1,
          "RMSE(PRSL) at R2 <= 0.1: [" + low_values + "]; at R2 = 0.8: " + fmt(top, 4) + ", " +
              fmt(seconds, 3) + " s"};
}

// 7, 8, 9 ---------------------------------------------------------------------

ProstateAnalysis prostate_analysis(int replicates, bool shrink_intercept) {
  ProstateAnalysisConfig cfg;
  cfg.replicates = replicates;
  cfg.shrink_intercept = shrink_intercept;
  cfg.workers = hardware_workers();
  return analyze_prostate(dshrink::testing::prostate(), cfg);
}

Outcome prostate_sparsity() {
  const ProstateAnalysis a = prostate_analysis(0, false);
  const std::vector<std::string> want{"lcavol", "lweight", "svi"};
  const auto& names = dshrink::testing::prostate().feature_names();
  bool pattern = true;
  for (std::size_t e = 0; e < a.fits.size(); ++e) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      const bool expected = std::find(want.begin(), want.end(), names[j]) != want.end();
      const bool nonzero = a.fits[e].coefficients.slopes(static_cast<Index>(j)) != 0.0;
      pattern = pattern && expected == nonzero;
    }
  }
  const bool range = a.selected_s >= 0.34 && a.selected_s <= 0.54;
  return {pattern && range && a.fits.size() == kTableEstimators.size(),
          "s_hat = " + fmt(a.selected_s) + ", support {lcavol, lweight, svi} in all " +
              std::to_string(a.fits.size()) + " columns: " + (pattern ? "yes" : "no")};
}

Outcome prostate_factor() {
  const ProstateAnalysis a = prostate_analysis(0, true);
  const auto idx = [&](Estimator e) {
    for (std::size_t i = 0; i < a.specs.size(); ++i) {
      if (a.specs[i].estimator == e) return i;
    }
    throw ConfigError("estimator missing from the analysis");
  };
  const PipelineFit& lasso = a.fits[idx(Estimator::Lasso)];
  const PipelineFit& prsl = a.fits[idx(Estimator::PRSL)];
  double worst = 0.0;
  bool zeros = true;
  for (Index j = 0; j < lasso.coefficients.slopes.size(); ++j) {
    const double l = lasso.coefficients.slopes(j);
    const double s = prsl.coefficients.slopes(j);
    if (l == 0.0) {
      zeros = zeros && s == 0.0;
    } else {
      worst = std::max(worst, std::abs(s / l - prsl.factor));
    }
  }
  const bool intercept_scaled =
      std::abs(prsl.centered_intercept - prsl.factor * lasso.centered_intercept) <=
      1e-12 * std::abs(lasso.centered_intercept);
  return {worst <= 1e-12 && zeros && intercept_scaled && prsl.factor >= 0.85 && prsl.factor <= 0.98,
          "factor = " + fmt(prsl.factor) + ", max |slope ratio - factor| = " + fmt(worst)};
}

Outcome rpe_ordering() {
  const ProstateAnalysis a = prostate_analysis(200, false);
  const EvalReport& r = *a.report;
  bool all_below = true;
  std::string values;
  double best = std::numeric_limits<double>::infinity();
  std::string best_label;
  for (const auto& e : r.estimators) {
    if (e.spec.estimator == Estimator::Lasso) continue;
    values += (values.empty() ? "" : ", ") + e.label + " " + fmt(e.rpe);
    all_below = all_below && e.rpe < 1.0;
    if (e.rpe < best) {
      best = e.rpe;
      best_label = e.label;
    }
  }
  return {all_below && best_label == "SL3_LOG",
          "RPE " + values + " (B = " + std::to_string(r.replicates_used) + ")"};
}

// 10 --------------------------------------------------------------------------

std::map<std::string, std::string> read_outputs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().filename() == "manifest.json") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[entry.path().filename().string()] = ss.str();
  }
  return out;
}

Outcome determinism() {
  const fs::path work = fs::temp_directory_path() / "dshrink_acceptance_determinism";
  fs::remove_all(work);
  const std::string cli = DSHRINK_CLI_PATH;
  const std::string data = dshrink::testing::data_path("prostate.csv");
  const std::vector<std::string> runs{
      "fit --data '" + data + "' --s 0.44",
      "simulate --n 40 --p 8 --replications 4 --grid-points 4 --estimators LASSO,PRSL,SL2,SL3_LOG "
      "--format table+svg",
      "prostate --data '" + data + "' --bootstrap 12 --format table+svg"};
  int compared = 0;
  std::string failure;
  for (std::size_t k = 0; k < runs.size() && failure.empty(); ++k) {
    std::vector<fs::path> dirs;
    for (const std::string tag : {"w1", "w4", "again_w1", "replay_w4"}) {
      const fs::path dir = work / (std::to_string(k) + "_" + tag);
      std::string cmd;
      if (tag == "replay_w4") {
        cmd = "'" + cli + "' --manifest '" + (dirs.front() / "manifest.json").string() + "'";
      } else {
        cmd = "'" + cli + "' " + runs[k];
      }
      cmd += " --workers " + std::string(tag.back() == '4' ? "4" : "1") + " --out-dir '" +
             dir.string() + "' > /dev/null";
      if (std::system(cmd.c_str()) != 0) {
        failure = "command failed: " + cmd;
        break;
      }
      dirs.push_back(dir);
    }
    if (!failure.empty()) break;
    const auto reference = read_outputs(dirs.front());
    for (std::size_t i = 1; i < dirs.size(); ++i) {
      if (read_outputs(dirs[i]) != reference) {
        failure = "outputs of '" + runs[k] + "' differ in " + dirs[i].filename().string();
      }
    }
    compared += static_cast<int>(reference.size());
  }
  fs::remove_all(work);
  if (!failure.empty()) return {false, failure};
  return {true, std::to_string(compared) + " output files identical across workers 1/4, reruns and "
                "manifest replay"};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "solver correctness", solver_correctness},
      {2, "Stein constant and W statistic", stein_statistics},
      {3, "shrinkage algebra", shrinkage_algebra},
      {4, "PRSL risk does not exceed SL risk", risk_ordering},
      {5, "Stein condition", stein_condition},
      {6, "simulation RMSE trends", simulation_trends},
      {7, "prostate sparsity at one-SE bound", prostate_sparsity},
      {8, "prostate PRSL shrinkage factor", prostate_factor},
      {9, "prostate RPE ordering", rpe_ordering},
      {10, "CLI determinism", determinism},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: dshrink_acceptance [--criterion N]\n";
      return 2;
    }
  }

  int failures = 0;
  int ran = 0;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s - %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  if (ran == 0) {
    std::cerr << "no criterion " << only << '\n';
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
