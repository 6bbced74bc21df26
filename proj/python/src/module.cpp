#include "dshrink/errors.hpp"
#include "dshrink/evaluation.hpp"
#include "dshrink/experiments.hpp"
#include "dshrink/lasso.hpp"
#include "dshrink/prostate_data.hpp"
#include "dshrink/shrinkage.hpp"
#include "dshrink/simulation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace dshrink;

namespace {

std::vector<std::string> default_names(Index p) {
  std::vector<std::string> out;
  for (Index j = 0; j < p; ++j) out.push_back("x" + std::to_string(j + 1));
  return out;
}

Dataset make_dataset(const Matrix& x, const Vector& y, std::optional<std::vector<std::string>> names) {
  return Dataset(y, x, names ? *names : default_names(x.cols()));
}

std::vector<Estimator> parse_list(const std::vector<std::string>& names) {
  std::vector<Estimator> out;
  for (const auto& n : names) out.push_back(parse_estimator(n));
  return out;
}

py::dict lasso_dict(const LassoFit& fit, const StandardizedDataset& sd) {
  const CoefficientVector c = destandardize(fit.slopes, sd);
  py::dict d;
  d["intercept"] = c.intercept;
  d["coefficients"] = c.slopes;
  d["standardized_coefficients"] = fit.slopes;
  d["lambda"] = fit.lambda;
  d["converged"] = fit.converged;
  d["sweeps"] = fit.sweeps_used;
  d["objective"] = fit.objective;
  d["kkt_violation"] = fit.kkt_violation;
  return d;
}

}  // namespace

PYBIND11_MODULE(_dshrink, m) {
  m.doc() = "LASSO with Stein-type post-shrinkage";
  m.attr("__version__") = DSHRINK_VERSION;

  static py::exception<DataError> data_error(m, "DataError", PyExc_ValueError);
  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<DomainError> domain_error(m, "DomainError", PyExc_ArithmeticError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DataError& e) {
      py::set_error(data_error, e.what());
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const DomainError& e) {
      py::set_error(domain_error, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical_error, e.what());
    }
  });

  m.def("soft_threshold", &soft_threshold, py::arg("z"), py::arg("t"));
  m.def("stein_constant", &stein_constant, py::arg("n"), py::arg("p"));
  m.def(
      "shrinkage_factor",
      [](const std::string& variant, double a, double w) {
        return shrinkage_factor(parse_variant(variant), a, w);
      },
      py::arg("variant"), py::arg("a"), py::arg("w"));

  m.def(
      "lasso",
      [](const Matrix& x, const Vector& y, double lam, bool scale, double tol, int max_sweeps) {
        const auto sd = standardize(make_dataset(x, y, std::nullopt), scale);
        LassoConfig cfg;
        cfg.lambda = lam;
        cfg.tol = tol;
        cfg.max_sweeps = max_sweeps;
        return lasso_dict(fit_lasso(sd, cfg), sd);
      },
      py::arg("x"), py::arg("y"), py::arg("lam"), py::arg("scale") = true,
      py::arg("tol") = 1e-7, py::arg("max_sweeps") = 10000,
      "Minimize ||yc - Xc b||^2 + lam * ||b||_1 on centered (and scaled) data.");

  m.def(
      "lasso_path",
      [](const Matrix& x, const Vector& y, int count, double ratio, bool scale) {
        const auto sd = standardize(make_dataset(x, y, std::nullopt), scale);
        const LassoPath path = compute_path(sd, lambda_grid(sd, count, ratio), LassoConfig{});
        const auto k = static_cast<Index>(path.points.size());
        Vector lambdas(k), s(k);
        Matrix coef(k, sd.p());
        for (Index i = 0; i < k; ++i) {
          const auto& pt = path.points[static_cast<std::size_t>(i)];
          lambdas(i) = pt.lambda;
          s(i) = pt.s;
          coef.row(i) = destandardize(pt.fit.slopes, sd).slopes.transpose();
        }
        py::dict d;
        d["lambda"] = lambdas;
        d["s"] = s;
        d["coefficients"] = coef;
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("count") = 100, py::arg("ratio") = 1e-3,
      py::arg("scale") = true);

  m.def(
      "fit",
      [](const Matrix& x, const Vector& y, std::optional<double> s, std::optional<double> lam,
         const std::vector<std::string>& estimators, bool scale, bool shrink_intercept) {
        if (s.has_value() == lam.has_value()) throw ConfigError("pass exactly one of s or lam");
        const Dataset d = make_dataset(x, y, std::nullopt);
        std::vector<EstimatorSpec> specs;
        for (const Estimator e : parse_list(estimators)) {
          EstimatorSpec spec;
          spec.penalty = s ? PenaltyKind::Bound : PenaltyKind::Lambda;
          spec.value = s ? *s : *lam;
          spec.estimator = e;
          spec.scale_columns = scale;
          spec.shrink_intercept = shrink_intercept;
          specs.push_back(spec);
        }
        const auto fits = fit_pipelines(d, specs);
        py::dict out;
        for (std::size_t i = 0; i < fits.size(); ++i) {
          py::dict f;
          f["intercept"] = fits[i].coefficients.intercept;
          f["coefficients"] = fits[i].coefficients.slopes;
          f["factor"] = fits[i].factor;
          f["s"] = fits[i].s;
          f["lambda"] = fits[i].lasso.lambda;
          if (fits[i].inputs) {
            f["a"] = fits[i].inputs->a;
            f["w"] = fits[i].inputs->w;
            f["sigma2"] = fits[i].inputs->sigma2;
          }
          out[py::str(specs[i].label())] = f;
        }
        return out;
      },
      py::arg("x"), py::arg("y"), py::kw_only(), py::arg("s") = py::none(),
      py::arg("lam") = py::none(),
      py::arg("estimators") = std::vector<std::string>{"LASSO", "PRSL", "SL2", "SL3_SQRT", "SL3_LOG"},
      py::arg("scale") = true, py::arg("shrink_intercept") = false);

  m.def(
      "load_prostate",
      [](const std::string& path) {
        const Dataset d = load_prostate_file(path).dataset;
        return py::make_tuple(d.x(), d.y(), d.feature_names());
      },
      py::arg("path"), "Returns (X, y, feature_names).");

  m.def(
      "simulate",
      [](Index n, Index p, double alpha, double r2_max, int grid_points, int replications,
         std::uint64_t seed, const std::vector<std::string>& estimators,
         const std::string& lambda_rule, int workers) {
        SimConfig cfg;
        cfg.n = n;
        cfg.p = p;
        cfg.alpha = alpha;
        cfg.r2_max = r2_max;
        cfg.grid_points = grid_points;
        cfg.replications = replications;
        cfg.seed = seed;
        cfg.estimators = parse_list(estimators);
        cfg.lambda_rule.kind = parse_lambda_rule(lambda_rule);
        cfg.workers = workers;
        SimResult r;
        {
          py::gil_scoped_release release;
          r = run_simulation(cfg);
        }
        py::list rows;
        for (const auto& c : r.cells) {
          py::dict row;
          row["r2"] = c.r2;
          row["estimator"] = std::string(to_string(c.estimator));
          row["mse"] = c.mse;
          row["rmse"] = c.rmse;
          row["mc_se"] = c.mc_se;
          rows.append(row);
        }
        return rows;
      },
      py::arg("n") = 50, py::arg("p") = 10, py::arg("alpha") = 0.1, py::arg("r2_max") = 0.5,
      py::arg("grid_points") = 20, py::arg("replications") = 1000, py::arg("seed") = kDefaultSeed,
      py::arg("estimators") = std::vector<std::string>{"LASSO", "PRSL"},
      py::arg("lambda_rule") = "cv-min", py::arg("workers") = 1);

  m.def(
      "analyze_prostate",
      [](const std::string& path, int bootstrap, std::uint64_t seed, int workers) {
        ProstateAnalysisConfig cfg;
        cfg.replicates = bootstrap;
        cfg.seed = seed;
        cfg.workers = workers;
        const Dataset d = load_prostate_file(path).dataset;
        ProstateAnalysis a;
        {
          py::gil_scoped_release release;
          a = analyze_prostate(d, cfg);
        }
        py::dict out;
        out["s_hat"] = a.selected_s;
        py::dict coef;
        for (std::size_t i = 0; i < a.fits.size(); ++i) {
          coef[py::str(a.specs[i].label())] = a.fits[i].coefficients.slopes;
        }
        out["coefficients"] = coef;
        out["feature_names"] = d.feature_names();
        if (a.report) {
          py::dict rpe;
          for (const auto& e : a.report->estimators) rpe[py::str(e.label)] = e.rpe;
          out["rpe"] = rpe;
        }
        return out;
      },
      py::arg("path"), py::arg("bootstrap") = 0, py::arg("seed") = kDefaultSeed,
      py::arg("workers") = 1);
}
