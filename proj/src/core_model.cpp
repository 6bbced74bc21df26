#include "dshrink/core_model.hpp"

#include "dshrink/errors.hpp"

#include <cmath>
#include <utility>

namespace dshrink {

namespace {

std::string describe_column(const std::vector<std::string>& names, Index j) {
  return "column '" + names[static_cast<std::size_t>(j)] + "'";
}

}  // namespace

Dataset::Dataset(Vector y, Matrix x, std::vector<std::string> feature_names,
                 std::vector<std::string> row_labels)
    : y_(std::move(y)),
      x_(std::move(x)),
      feature_names_(std::move(feature_names)),
      row_labels_(std::move(row_labels)) {
  if (x_.rows() < 1 || x_.cols() < 1) {
    throw DataError("dataset needs at least one row and one column, got " +
                    std::to_string(x_.rows()) + "x" + std::to_string(x_.cols()));
  }
  if (y_.size() != x_.rows()) {
    throw DataError("response has " + std::to_string(y_.size()) + " entries but X has " +
                    std::to_string(x_.rows()) + " rows");
  }
  if (static_cast<Index>(feature_names_.size()) != x_.cols()) {
    throw DataError("expected " + std::to_string(x_.cols()) + " feature names, got " +
                    std::to_string(feature_names_.size()));
  }
  if (!row_labels_.empty() && static_cast<Index>(row_labels_.size()) != x_.rows()) {
    throw DataError("row label count does not match row count");
  }
  for (Index i = 0; i < x_.rows(); ++i) {
    if (!std::isfinite(y_(i))) {
      throw DataError("non-finite response at row " + std::to_string(i + 1));
    }
    for (Index j = 0; j < x_.cols(); ++j) {
      if (!std::isfinite(x_(i, j))) {
        throw DataError("non-finite value at row " + std::to_string(i + 1) + ", " +
                        describe_column(feature_names_, j));
      }
    }
  }
}

Dataset Dataset::select_rows(std::span<const Index> rows) const {
  const auto m = static_cast<Index>(rows.size());
  Vector y(m);
  Matrix x(m, p());
  std::vector<std::string> labels;
  if (!row_labels_.empty()) labels.reserve(rows.size());
  for (Index r = 0; r < m; ++r) {
    const Index src = rows[static_cast<std::size_t>(r)];
    if (src < 0 || src >= n()) throw DataError("row index out of range");
    y(r) = y_(src);
    x.row(r) = x_.row(src);
    if (!row_labels_.empty()) labels.push_back(row_labels_[static_cast<std::size_t>(src)]);
  }
  return Dataset(std::move(y), std::move(x), feature_names_, std::move(labels));
}

StandardizedDataset standardize(const Dataset& d, bool scale_columns) {
  const Index n = d.n();
  const Index p = d.p();
  StandardizedDataset sd;
  sd.scaled = scale_columns;
  sd.feature_names = d.feature_names();
  sd.column_means = d.x().colwise().mean().transpose();
  sd.column_scales = Vector::Ones(p);
  sd.y_mean = d.y().mean();
  sd.xc = d.x().rowwise() - sd.column_means.transpose();
  sd.yc = d.y().array() - sd.y_mean;

  if (scale_columns) {
    for (Index j = 0; j < p; ++j) {
      const auto col = d.x().col(j);
      if (col.maxCoeff() == col.minCoeff()) {
        throw DataError("zero-variance " + describe_column(d.feature_names(), j) +
                        " cannot be scaled");
      }
      const double sdev = std::sqrt(sd.xc.col(j).squaredNorm() / static_cast<double>(n - 1));
      sd.column_scales(j) = sdev;
      sd.xc.col(j) /= sdev;
    }
  }
  return sd;
}

Matrix transform_rows(const StandardizedDataset& sd, const Matrix& raw_x) {
  if (raw_x.cols() != sd.p()) throw DataError("column count mismatch in transform_rows");
  Matrix out = raw_x.rowwise() - sd.column_means.transpose();
  out.array().rowwise() /= sd.column_scales.transpose().array();
  return out;
}

CoefficientVector destandardize(const Vector& fit_slopes, const StandardizedDataset& sd) {
  if (fit_slopes.size() != sd.p()) {
    throw DataError("slope vector has length " + std::to_string(fit_slopes.size()) +
                    ", dataset has " + std::to_string(sd.p()) + " columns");
  }
  CoefficientVector out;
  out.slopes = fit_slopes.array() / sd.column_scales.array();
  out.intercept = sd.y_mean - sd.column_means.dot(out.slopes);
  return out;
}

Matrix gram(const StandardizedDataset& sd) {
  const Index p = sd.p();
  Matrix g(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index k = j; k < p; ++k) {
      const double v = sd.xc.col(j).dot(sd.xc.col(k));
      g(j, k) = v;
      g(k, j) = v;
    }
  }
  return g;
}

Vector predict(const CoefficientVector& coef, const Matrix& raw_x) {
  if (raw_x.cols() != coef.slopes.size()) throw DataError("column count mismatch in predict");
  return (raw_x * coef.slopes).array() + coef.intercept;
}

}  // namespace dshrink
