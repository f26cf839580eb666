#pragma once

#include "fastfrechet/core.hpp"
#include "fastfrechet/friso.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fastfrechet {

struct CvReport {
  std::vector<double> tau_grid;
  /// Mean held-out squared W2 error per tau.
  std::vector<double> cv_error;
  double tau_star = 0.0;
  /// Fold id of every subject.
  std::vector<std::size_t> fold_assignments;
  std::size_t K = 0;
  std::uint64_t seed = 0;
};

struct StabilityReport {
  std::vector<double> tau_grid;
  /// p x |grid| selection proportions.
  Eigen::MatrixXd proportions;
  Vector max_proportion;
  /// 0-based indices of variables whose max proportion reaches pi_threshold.
  std::vector<std::size_t> selected;
  std::size_t B = 0;
  double pi_threshold = 0.9;
  double selection_cutoff = 0.01;
  std::uint64_t seed = 0;
};

/// Shuffle 0..n-1 with the seeded stream, then deal round-robin into K folds.
std::vector<std::size_t> assign_folds(std::size_t n, std::size_t K, std::uint64_t seed);

/// K-fold cross-validation of the weighted Frechet predictor over a tau grid.
/// Each training fold solves the whole path with warm starts; held-out
/// subjects are predicted at lambda-hat(tau) and scored by squared W2.
/// Folds run on `threads` workers (0 = all cores); the result does not depend
/// on the thread count.
CvReport kfold_cv(const CovariateMatrix& X, const QuantileMatrix& Y,
                  const std::vector<double>& tau_grid, SupportBounds bounds, std::size_t K,
                  const DescentConfig& config, std::uint64_t seed, std::size_t threads = 1);

/// Stability selection over B half-samples drawn without replacement.
/// Replicate b uses RandomStream(seed, b), so results do not depend on the
/// order in which replicates run.
StabilityReport stability_selection(const CovariateMatrix& X, const QuantileMatrix& Y,
                                    const std::vector<double>& tau_grid, SupportBounds bounds,
                                    std::size_t B, double pi_threshold, double selection_cutoff,
                                    const DescentConfig& config, std::uint64_t seed,
                                    std::size_t threads = 1);

}  // namespace fastfrechet
