#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace fastfrechet {

/// Row-major dense matrix; rows are subjects, so row access is contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Probability levels in (0,1), strictly increasing.
class ProbabilityGrid {
public:
  /// Takes arbitrary levels; throws InvalidArgument unless they are strictly
  /// increasing and inside the open unit interval.
  explicit ProbabilityGrid(std::vector<double> levels);

  std::size_t size() const noexcept { return levels_.size(); }
  double operator[](std::size_t k) const noexcept { return levels_[k]; }
  std::span<const double> levels() const noexcept { return levels_; }

private:
  std::vector<double> levels_;
};

/// Midpoint grid (2k+1)/(2m), k = 0..m-1.
ProbabilityGrid make_grid(std::size_t m);

/// n x m matrix whose rows are quantile functions on a shared grid.
/// Rows are non-decreasing to within kMonotoneTolerance and entries are finite.
class QuantileMatrix {
public:
  static constexpr double kMonotoneTolerance = 1e-12;

  QuantileMatrix() = default;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  const RowMatrix& values() const noexcept { return values_; }

  QuantileMatrix select_rows(std::span<const std::size_t> rows) const;

private:
  friend QuantileMatrix validate_quantile_matrix(RowMatrix);
  friend QuantileMatrix assume_quantile_matrix(RowMatrix);
  explicit QuantileMatrix(RowMatrix values) : values_(std::move(values)) {}

  RowMatrix values_;
};

/// Checks every row for finiteness and monotonicity. Throws ValidationError
/// listing every offending (row, column) pair.
QuantileMatrix validate_quantile_matrix(RowMatrix values);

/// Wraps values already known to satisfy the invariant (solver output).
/// Not checked outside debug builds.
QuantileMatrix assume_quantile_matrix(RowMatrix values);

/// n x p covariates; n >= 2, p >= 1, finite entries.
class CovariateMatrix {
public:
  CovariateMatrix() = default;
  explicit CovariateMatrix(RowMatrix values);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  const RowMatrix& values() const noexcept { return values_; }

  CovariateMatrix select_rows(std::span<const std::size_t> rows) const;

private:
  RowMatrix values_;
};

/// Support of the response distributions. Either side may be infinite.
struct SupportBounds {
  double lower = -kInf;
  double upper = kInf;

  SupportBounds() = default;
  SupportBounds(double lo, double hi);

  bool has_lower() const noexcept { return lower > -kInf; }
  bool has_upper() const noexcept { return upper < kInf; }
};

/// Point of the tau-simplex: lambda >= 0, sum(lambda) = tau.
class SimplexWeights {
public:
  /// Clamps negative entries to zero and rescales to sum tau.
  SimplexWeights(double tau, Vector lambda);

  double tau() const noexcept { return tau_; }
  const Vector& lambda() const noexcept { return lambda_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(lambda_.size()); }

private:
  double tau_;
  Vector lambda_;
};

/// Discretized squared 2-Wasserstein distance (1/m) * sum_k (q1[k] - q2[k])^2.
double wasserstein2_sq(std::span<const double> q1, std::span<const double> q2);

/// Overload that checks both rows against the grid length.
double wasserstein2_sq(std::span<const double> q1, std::span<const double> q2,
                       const ProbabilityGrid& grid);

/// Contiguous view of one row of a RowMatrix.
inline std::span<const double> row_span(const RowMatrix& mat, Eigen::Index i) {
  return {mat.data() + i * mat.cols(), static_cast<std::size_t>(mat.cols())};
}

}  // namespace fastfrechet
