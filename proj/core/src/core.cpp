#include "fastfrechet/core.hpp"

#include "fastfrechet/errors.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace fastfrechet {

ProbabilityGrid::ProbabilityGrid(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) {
    throw InvalidArgument("probability grid must have at least one level");
  }
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    const double u = levels_[k];
    if (!(u > 0.0 && u < 1.0)) {
      throw InvalidArgument("probability grid level " + std::to_string(k) + " outside (0,1)");
    }
    if (k > 0 && !(u > levels_[k - 1])) {
      throw InvalidArgument("probability grid not strictly increasing at level " +
                            std::to_string(k));
    }
  }
}

ProbabilityGrid make_grid(std::size_t m) {
  if (m == 0) {
    throw InvalidArgument("grid size m must be at least 1");
  }
  std::vector<double> levels(m);
  const double denom = 2.0 * static_cast<double>(m);
  for (std::size_t k = 0; k < m; ++k) {
    levels[k] = static_cast<double>(2 * k + 1) / denom;
  }
  return ProbabilityGrid(std::move(levels));
}

QuantileMatrix validate_quantile_matrix(RowMatrix values) {
  std::vector<ValidationError::Position> bad;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index k = 0; k < values.cols(); ++k) {
      const double v = values(i, k);
      const bool nonfinite = !std::isfinite(v);
      const bool decreasing = k > 0 && std::isfinite(values(i, k - 1)) && !nonfinite &&
                              v < values(i, k - 1) - QuantileMatrix::kMonotoneTolerance;
      if (nonfinite || decreasing) {
        bad.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(k));
      }
    }
  }
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "quantile matrix invalid (non-finite or decreasing) at";
    const std::size_t shown = std::min<std::size_t>(bad.size(), 10);
    for (std::size_t t = 0; t < shown; ++t) {
      msg << " (row " << bad[t].first << ", col " << bad[t].second << ")";
    }
    if (bad.size() > shown) {
      msg << " and " << bad.size() - shown << " more";
    }
    throw ValidationError(msg.str(), std::move(bad));
  }
  return QuantileMatrix(std::move(values));
}

QuantileMatrix assume_quantile_matrix(RowMatrix values) {
#ifndef NDEBUG
  return validate_quantile_matrix(std::move(values));
#else
  return QuantileMatrix(std::move(values));
#endif
}

QuantileMatrix QuantileMatrix::select_rows(std::span<const std::size_t> rows) const {
  RowMatrix out(static_cast<Eigen::Index>(rows.size()), values_.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = values_.row(static_cast<Eigen::Index>(rows[r]));
  }
  return QuantileMatrix(std::move(out));
}

CovariateMatrix::CovariateMatrix(RowMatrix values) : values_(std::move(values)) {
  if (values_.rows() < 2) {
    throw InvalidArgument("covariate matrix needs at least 2 rows");
  }
  if (values_.cols() < 1) {
    throw InvalidArgument("covariate matrix needs at least 1 column");
  }
  if (!values_.allFinite()) {
    throw InvalidArgument("covariate matrix has non-finite entries");
  }
}

CovariateMatrix CovariateMatrix::select_rows(std::span<const std::size_t> rows) const {
  RowMatrix out(static_cast<Eigen::Index>(rows.size()), values_.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = values_.row(static_cast<Eigen::Index>(rows[r]));
  }
  return CovariateMatrix(std::move(out));
}

SupportBounds::SupportBounds(double lo, double hi) : lower(lo), upper(hi) {
  if (std::isnan(lo) || std::isnan(hi) || lo == kInf || hi == -kInf) {
    throw InvalidArgument("support bounds must be numbers with lower < +inf and upper > -inf");
  }
  if (!(lo < hi)) {
    throw InvalidArgument("support bounds require lower < upper");
  }
}

SimplexWeights::SimplexWeights(double tau, Vector lambda) : tau_(tau), lambda_(std::move(lambda)) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument("tau must be a positive finite number");
  }
  if (lambda_.size() == 0 || !lambda_.allFinite()) {
    throw InvalidArgument("simplex weights must be non-empty and finite");
  }
  lambda_ = lambda_.cwiseMax(0.0);
  const double total = lambda_.sum();
  if (!(total > 0.0)) {
    throw InvalidArgument("simplex weights must have positive mass");
  }
  lambda_ *= tau_ / total;
}

double wasserstein2_sq(std::span<const double> q1, std::span<const double> q2) {
  if (q1.size() != q2.size()) {
    throw InvalidArgument("wasserstein2_sq: rows have different lengths");
  }
  if (q1.empty()) {
    throw InvalidArgument("wasserstein2_sq: empty rows");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < q1.size(); ++k) {
    const double d = q1[k] - q2[k];
    acc += d * d;
  }
  return acc / static_cast<double>(q1.size());
}

double wasserstein2_sq(std::span<const double> q1, std::span<const double> q2,
                       const ProbabilityGrid& grid) {
  if (q1.size() != grid.size() || q2.size() != grid.size()) {
    throw InvalidArgument("wasserstein2_sq: row length does not match grid size");
  }
  return wasserstein2_sq(q1, q2);
}

}  // namespace fastfrechet
