#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace dshrink {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A regression problem: response y (length n), covariates X (n x p) and one
/// label per column. Validated on construction; immutable afterwards.
class Dataset {
 public:
  Dataset(Vector y, Matrix x, std::vector<std::string> feature_names,
          std::vector<std::string> row_labels = {});

  const Vector& y() const noexcept { return y_; }
  const Matrix& x() const noexcept { return x_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::vector<std::string>& row_labels() const noexcept { return row_labels_; }
  Index n() const noexcept { return x_.rows(); }
  Index p() const noexcept { return x_.cols(); }

  /// Rows in the given order; indices may repeat (bootstrap resampling).
  Dataset select_rows(std::span<const Index> rows) const;

 private:
  Vector y_;
  Matrix x_;
  std::vector<std::string> feature_names_;
  std::vector<std::string> row_labels_;
};

/// Centered (and optionally unit-variance) copy of a dataset together with the
/// statistics needed to map coefficients back to original units.
struct StandardizedDataset {
  Matrix xc;
  Vector yc;
  Vector column_means;
  Vector column_scales;  // all ones when scaling is disabled
  double y_mean = 0.0;
  bool scaled = false;
  std::vector<std::string> feature_names;

  Index n() const noexcept { return xc.rows(); }
  Index p() const noexcept { return xc.cols(); }
};

struct CoefficientVector {
  double intercept = 0.0;
  Vector slopes;
};

/// Centers every column and the response. With `scale_columns` each column is
/// also divided by its sample standard deviation (divisor n - 1).
/// Throws DataError naming the column when scaling meets a constant column.
StandardizedDataset standardize(const Dataset& d, bool scale_columns);

/// Applies the stored centering/scaling of `sd` to new raw covariate rows.
Matrix transform_rows(const StandardizedDataset& sd, const Matrix& raw_x);

/// Maps slopes fitted on `sd.xc` back to original units, with the intercept
/// that restores the response mean.
CoefficientVector destandardize(const Vector& fit_slopes, const StandardizedDataset& sd);

/// XcᵀXc, exactly symmetric.
Matrix gram(const StandardizedDataset& sd);

Vector predict(const CoefficientVector& coef, const Matrix& raw_x);

}  // namespace dshrink
