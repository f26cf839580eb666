#pragma once

#include "fastfrechet/core.hpp"
#include "fastfrechet/random.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

namespace fastfrechet::testing {

inline RowMatrix random_matrix(std::size_t rows, std::size_t cols, RandomStream& rng) {
  RowMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      out(i, j) = rng.normal();
    }
  }
  return out;
}

/// Rows are sorted normal draws shifted by a per-row location.
inline RowMatrix random_quantile_rows(std::size_t n, std::size_t m, RandomStream& rng,
                                      double spread = 1.0) {
  RowMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  std::vector<double> row(m);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double shift = rng.normal();
    for (auto& v : row) {
      v = spread * rng.normal();
    }
    std::sort(row.begin(), row.end());
    for (std::size_t k = 0; k < m; ++k) {
      out(i, static_cast<Eigen::Index>(k)) = shift + row[k];
    }
  }
  return out;
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace fastfrechet::testing
