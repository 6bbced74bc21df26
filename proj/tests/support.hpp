#pragma once

#include "dshrink/core_model.hpp"
#include "dshrink/prostate_data.hpp"
#include "dshrink/random.hpp"

#include <random>
#include <string>
#include <vector>

namespace dshrink::testing {

inline Matrix normal_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> z;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = z(rng);
  }
  return m;
}

inline Vector normal_vector(Index n, Rng& rng) { return normal_matrix(n, 1, rng).col(0); }

inline std::vector<std::string> names(Index p) {
  std::vector<std::string> out;
  for (Index j = 0; j < p; ++j) out.push_back("x" + std::to_string(j + 1));
  return out;
}

/// y = X beta + noise with i.i.d. normal X.
inline Dataset random_dataset(Index n, Index p, Rng& rng, double noise = 1.0) {
  Matrix x = normal_matrix(n, p, rng);
  const Vector beta = normal_vector(p, rng);
  Vector y = x * beta + noise * normal_vector(n, rng);
  return Dataset(std::move(y), std::move(x), names(p));
}

/// Dataset whose centered design has orthonormal columns.
inline StandardizedDataset orthonormal_problem(Index n, Index p, Rng& rng) {
  Matrix x = normal_matrix(n, p, rng);
  x.rowwise() -= x.colwise().mean();
  Eigen::HouseholderQR<Matrix> qr(x);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, p);
  Vector y = q * (3.0 * normal_vector(p, rng)) + normal_vector(n, rng);
  return standardize(Dataset(y, q, names(p)), false);
}

inline std::string data_path(const std::string& file) {
  return std::string(DSHRINK_TEST_DATA_DIR) + "/" + file;
}

inline const Dataset& prostate() {
  static const Dataset d = load_prostate_file(data_path("prostate.csv")).dataset;
  return d;
}

}  // namespace dshrink::testing
