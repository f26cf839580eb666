#pragma once

#include "fastfrechet/core.hpp"
#include "fastfrechet/monotone_qp.hpp"

#include <cstddef>
#include <vector>

namespace fastfrechet {

/// Column means, centered covariates and the 1/n sample covariance.
struct CenteredDesign {
  Vector xbar;
  RowMatrix Xc;
  Eigen::MatrixXd Sigma;

  std::size_t n() const noexcept { return static_cast<std::size_t>(Xc.rows()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(Xc.cols()); }
};

CenteredDesign center_design(const CovariateMatrix& X);

struct FrechetFit {
  QuantileMatrix Qhat;
  std::vector<ActiveSet> active_sets;
  SupportBounds bounds;
  /// Working-set changes summed over rows.
  std::size_t qp_iterations = 0;
};

/// Largest condition number of Sigma accepted before SingularDesign is thrown.
inline constexpr double kMaxDesignCondition = 1e12;

/// Global Frechet regression hat matrix (1/n)(11' + Xc Sigma^{-1} Xc').
/// Throws SingularDesign when Sigma is singular or too ill-conditioned.
Eigen::MatrixXd frechet_hat_matrix(const CenteredDesign& design);

/// In-sample global Frechet regression in 2-Wasserstein space: row i of the
/// fit is the projection of (H Y)_i onto monotone quantile functions within
/// `bounds`. Rows are projected on `threads` workers (0 = all cores).
FrechetFit fit_frechet(const CovariateMatrix& X, const QuantileMatrix& Y, SupportBounds bounds,
                       std::size_t threads = 1);

/// Out-of-sample prediction at the rows of Xnew using the weights
/// s_i(x) = 1 + (x - xbar)' Sigma^{-1} (x_i - xbar).
QuantileMatrix predict_frechet(const CovariateMatrix& X, const QuantileMatrix& Y,
                               SupportBounds bounds, const RowMatrix& Xnew,
                               std::size_t threads = 1);

/// Projects every row of `raw` (independently, in parallel) and assembles the
/// results in row order. Optional warm starts are indexed by row.
FrechetFit project_rows(const RowMatrix& raw, SupportBounds bounds,
                        const std::vector<ActiveSet>* warm = nullptr, std::size_t threads = 1);

}  // namespace fastfrechet
