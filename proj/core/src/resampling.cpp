#include "fastfrechet/resampling.hpp"

#include "fastfrechet/errors.hpp"
#include "fastfrechet/parallel.hpp"
#include "fastfrechet/random.hpp"

#include <algorithm>
#include <string>

namespace fastfrechet {

namespace {

// Stream id for the fold shuffle; replicate streams use ids 0..B-1.
constexpr std::uint64_t kFoldStream = 0xF01D5ULL;

}  // namespace

std::vector<std::size_t> assign_folds(std::size_t n, std::size_t K, std::uint64_t seed) {
  if (K < 2 || K > n) {
    throw InvalidArgument("number of folds K must satisfy 2 <= K <= n (K = " + std::to_string(K) +
                          ", n = " + std::to_string(n) + ")");
  }
  RandomStream rng(seed, kFoldStream);
  const std::vector<std::size_t> perm = rng.permutation(n);
  std::vector<std::size_t> folds(n);
  for (std::size_t i = 0; i < n; ++i) {
    folds[perm[i]] = i % K;
  }
  return folds;
}

CvReport kfold_cv(const CovariateMatrix& X, const QuantileMatrix& Y,
                  const std::vector<double>& tau_grid, SupportBounds bounds, std::size_t K,
                  const DescentConfig& config, std::uint64_t seed, std::size_t threads) {
  if (X.rows() != Y.rows()) {
    throw InvalidArgument("covariates and responses have different row counts");
  }
  const std::size_t n = X.rows();
  CvReport report;
  report.tau_grid = tau_grid;
  report.K = K;
  report.seed = seed;
  report.fold_assignments = assign_folds(n, K, seed);

  DescentConfig inner = config;
  inner.threads = 1;
  std::vector<std::vector<double>> fold_error(K);

  parallel_for(K, threads, [&](std::size_t f) {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < n; ++i) {
      (report.fold_assignments[i] == f ? test : train).push_back(i);
    }
    const CovariateMatrix X_train = X.select_rows(train);
    const QuantileMatrix Y_train = Y.select_rows(train);
    RowMatrix X_test(static_cast<Eigen::Index>(test.size()), static_cast<Eigen::Index>(X.cols()));
    for (std::size_t t = 0; t < test.size(); ++t) {
      X_test.row(static_cast<Eigen::Index>(t)) = X.values().row(static_cast<Eigen::Index>(test[t]));
    }

    const FrisoProblem problem(X_train, Y_train, bounds, 1);
    const PathResult path = solution_path(problem, tau_grid, inner, true);

    std::vector<double>& err = fold_error[f];
    err.assign(tau_grid.size(), 0.0);
    for (std::size_t k = 0; k < tau_grid.size(); ++k) {
      const Vector lambda = path.lambda.col(static_cast<Eigen::Index>(k));
      const RowMatrix pred = problem.predict(lambda, X_test);
      for (std::size_t t = 0; t < test.size(); ++t) {
        err[k] += wasserstein2_sq(row_span(pred, static_cast<Eigen::Index>(t)),
                                  row_span(Y.values(), static_cast<Eigen::Index>(test[t])));
      }
    }
  });

  report.cv_error.assign(tau_grid.size(), 0.0);
  for (std::size_t f = 0; f < K; ++f) {
    for (std::size_t k = 0; k < tau_grid.size(); ++k) {
      report.cv_error[k] += fold_error[f][k];
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 0; k < tau_grid.size(); ++k) {
    report.cv_error[k] /= static_cast<double>(n);
    if (report.cv_error[k] < report.cv_error[best]) {
      best = k;
    }
  }
  report.tau_star = tau_grid[best];
  return report;
}

StabilityReport stability_selection(const CovariateMatrix& X, const QuantileMatrix& Y,
                                    const std::vector<double>& tau_grid, SupportBounds bounds,
                                    std::size_t B, double pi_threshold, double selection_cutoff,
                                    const DescentConfig& config, std::uint64_t seed,
                                    std::size_t threads) {
  if (B < 1) {
    throw InvalidArgument("number of replicates B must be at least 1");
  }
  if (!(pi_threshold > 0.5 && pi_threshold <= 1.0)) {
    throw InvalidArgument("pi_threshold must lie in (0.5, 1]");
  }
  if (!(selection_cutoff >= 0.0)) {
    throw InvalidArgument("selection_cutoff must be non-negative");
  }
  if (X.rows() != Y.rows()) {
    throw InvalidArgument("covariates and responses have different row counts");
  }
  const std::size_t n = X.rows();
  const std::size_t p = X.cols();
  const std::size_t half = n / 2;
  if (half < 2) {
    throw InvalidArgument("stability selection needs n >= 4 so half-samples have 2 subjects");
  }
  const std::size_t G = tau_grid.size();

  DescentConfig inner = config;
  inner.threads = 1;
  // selected_at[b](j, k) = 1 when replicate b selects variable j at tau_k.
  std::vector<Eigen::MatrixXi> selected_at(B);

  parallel_for(B, threads, [&](std::size_t b) {
    RandomStream rng(seed, b);
    const std::vector<std::size_t> rows = rng.subsample(n, half);
    const FrisoProblem problem(X.select_rows(rows), Y.select_rows(rows), bounds, 1);
    const PathResult path = solution_path(problem, tau_grid, inner, true);
    Eigen::MatrixXi sel = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(p),
                                                static_cast<Eigen::Index>(G));
    for (std::size_t k = 0; k < G; ++k) {
      const double cutoff = selection_cutoff * tau_grid[k] / static_cast<double>(p);
      for (std::size_t j = 0; j < p; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const auto kk = static_cast<Eigen::Index>(k);
        sel(jj, kk) = path.lambda(jj, kk) > cutoff ? 1 : 0;
      }
    }
    selected_at[b] = std::move(sel);
  });

  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(p),
                                                 static_cast<Eigen::Index>(G));
  for (const auto& sel : selected_at) {
    counts += sel;
  }

  StabilityReport report;
  report.tau_grid = tau_grid;
  report.B = B;
  report.pi_threshold = pi_threshold;
  report.selection_cutoff = selection_cutoff;
  report.seed = seed;
  report.proportions = counts.cast<double>() / static_cast<double>(B);
  report.max_proportion = report.proportions.rowwise().maxCoeff();
  for (std::size_t j = 0; j < p; ++j) {
    if (report.max_proportion[static_cast<Eigen::Index>(j)] >= pi_threshold) {
      report.selected.push_back(j);
    }
  }
  return report;
}

}  // namespace fastfrechet
