#include "fastfrechet/frechet.hpp"

#include "fastfrechet/errors.hpp"
#include "fastfrechet/parallel.hpp"

#include <string>

namespace fastfrechet {

namespace {

void check_shapes(const CovariateMatrix& X, const QuantileMatrix& Y) {
  if (X.rows() != Y.rows()) {
    throw InvalidArgument("covariates have " + std::to_string(X.rows()) +
                          " rows but responses have " + std::to_string(Y.rows()));
  }
  if (Y.cols() == 0) {
    throw InvalidArgument("responses have no grid points");
  }
}

// Factorization of Sigma after the conditioning check.
Eigen::LDLT<Eigen::MatrixXd> factor_covariance(const Eigen::MatrixXd& Sigma) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Sigma, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo >= kMaxDesignCondition) {
    throw SingularDesign(
        "sample covariance of the covariates is singular or ill-conditioned; "
        "use variable selection (select/path), whose weighted fit is always well-posed");
  }
  return Eigen::LDLT<Eigen::MatrixXd>(Sigma);
}

}  // namespace

CenteredDesign center_design(const CovariateMatrix& X) {
  CenteredDesign d;
  const auto n = static_cast<double>(X.rows());
  d.xbar = X.values().colwise().mean().transpose();
  d.Xc = X.values().rowwise() - d.xbar.transpose();
  d.Sigma = (d.Xc.transpose() * d.Xc) / n;
  d.Sigma = 0.5 * (d.Sigma + d.Sigma.transpose()).eval();
  return d;
}

Eigen::MatrixXd frechet_hat_matrix(const CenteredDesign& design) {
  const auto n = static_cast<Eigen::Index>(design.n());
  const auto ldlt = factor_covariance(design.Sigma);
  const Eigen::MatrixXd SinvXct = ldlt.solve(design.Xc.transpose());
  Eigen::MatrixXd H = design.Xc * SinvXct;
  H.array() += 1.0;
  H /= static_cast<double>(n);
  return H;
}

FrechetFit project_rows(const RowMatrix& raw, SupportBounds bounds,
                        const std::vector<ActiveSet>* warm, std::size_t threads) {
  const auto n = static_cast<std::size_t>(raw.rows());
  if (warm != nullptr && warm->size() != n) {
    throw InvalidArgument("warm-start active sets do not match the number of rows");
  }
  RowMatrix out(raw.rows(), raw.cols());
  std::vector<ActiveSet> sets(n);
  std::vector<std::size_t> iters(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    auto res = project_monotone(row_span(raw, row), bounds, warm ? &(*warm)[i] : nullptr);
    out.row(row) = res.q.transpose();
    sets[i] = std::move(res.active);
    iters[i] = res.iterations;
  });
  FrechetFit fit{assume_quantile_matrix(std::move(out)), std::move(sets), bounds, 0};
  for (std::size_t it : iters) {
    fit.qp_iterations += it;
  }
  return fit;
}

FrechetFit fit_frechet(const CovariateMatrix& X, const QuantileMatrix& Y, SupportBounds bounds,
                       std::size_t threads) {
  check_shapes(X, Y);
  const CenteredDesign design = center_design(X);
  const Eigen::MatrixXd H = frechet_hat_matrix(design);
  const RowMatrix raw = H * Y.values();
  return project_rows(raw, bounds, nullptr, threads);
}

QuantileMatrix predict_frechet(const CovariateMatrix& X, const QuantileMatrix& Y,
                               SupportBounds bounds, const RowMatrix& Xnew, std::size_t threads) {
  check_shapes(X, Y);
  if (static_cast<std::size_t>(Xnew.cols()) != X.cols()) {
    throw InvalidArgument("prediction points have " + std::to_string(Xnew.cols()) +
                          " columns, expected " + std::to_string(X.cols()));
  }
  const CenteredDesign design = center_design(X);
  const auto ldlt = factor_covariance(design.Sigma);
  const RowMatrix Dnew = Xnew.rowwise() - design.xbar.transpose();
  // S(r, i) = 1 + (xnew_r - xbar)' Sigma^{-1} (x_i - xbar)
  Eigen::MatrixXd S = Dnew * ldlt.solve(design.Xc.transpose());
  S.array() += 1.0;
  const RowMatrix raw = (S * Y.values()) / static_cast<double>(design.n());
  return project_rows(raw, bounds, nullptr, threads).Qhat;
}

}  // namespace fastfrechet
