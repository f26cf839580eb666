#include "fastfrechet/datagen.hpp"
#include "fastfrechet/errors.hpp"
#include "fastfrechet/frechet.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace fastfrechet;
using namespace fastfrechet::testing;

TEST(CenterDesign, TwoPoints) {
  RowMatrix x(2, 1);
  x << 1, 3;
  const auto d = center_design(CovariateMatrix(x));
  EXPECT_EQ(d.xbar[0], 2.0);
  EXPECT_EQ(d.Xc(0, 0), -1.0);
  EXPECT_EQ(d.Xc(1, 0), 1.0);
  EXPECT_EQ(d.Sigma(0, 0), 1.0);
}

TEST(CenterDesign, ConstantColumnsGiveZeroCovariance) {
  RowMatrix x(2, 2);
  x << 1, 0, 1, 0;
  EXPECT_EQ(center_design(CovariateMatrix(x)).Sigma, Eigen::MatrixXd::Zero(2, 2));
}

TEST(CenterDesign, ColumnsSumToZeroAndSigmaSymmetric) {
  RandomStream rng(1, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = center_design(CovariateMatrix(random_matrix(5 + rng.below(20), 1 + rng.below(6), rng)));
    EXPECT_LT(d.Xc.colwise().sum().cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(max_abs(d.Sigma - d.Sigma.transpose()), 1e-12);
  }
}

TEST(FrechetHat, TwoPointRegressionIsIdentity) {
  RowMatrix x(2, 1);
  x << -0.3, 1.7;
  const auto H = frechet_hat_matrix(center_design(CovariateMatrix(x)));
  EXPECT_LT(max_abs(H - Eigen::MatrixXd::Identity(2, 2)), 1e-12);

  RowMatrix y(2, 3);
  y << 0, 1, 2, -1, -1, 5;
  const auto fit = fit_frechet(CovariateMatrix(x), validate_quantile_matrix(y), {});
  EXPECT_LT(max_abs(fit.Qhat.values() - y), 1e-12);
}

TEST(FrechetHat, RowSumsAndSymmetry) {
  RandomStream rng(2, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t p = 1 + rng.below(5);
    const auto d = center_design(CovariateMatrix(random_matrix(p + 3 + rng.below(30), p, rng)));
    const auto H = frechet_hat_matrix(d);
    EXPECT_LT((H.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-10);
    EXPECT_LT(max_abs(H - H.transpose()), 1e-12);
  }
}

TEST(FitFrechet, IdenticalRowsAreSingular) {
  RowMatrix x(3, 2);
  x << 1, 2, 1, 2, 1, 2;
  RowMatrix y = RowMatrix::Zero(3, 2);
  EXPECT_THROW(fit_frechet(CovariateMatrix(x), validate_quantile_matrix(y), {}), SingularDesign);
}

TEST(FitFrechet, CollinearColumnsAreSingular) {
  RandomStream rng(3, 0);
  RowMatrix x = random_matrix(20, 3, rng);
  x.col(2) = 2.0 * x.col(0) - x.col(1);
  const auto y = validate_quantile_matrix(random_quantile_rows(20, 4, rng));
  EXPECT_THROW(fit_frechet(CovariateMatrix(x), y, {}), SingularDesign);
}

TEST(FitFrechet, RowCountMismatch) {
  RandomStream rng(4, 0);
  const CovariateMatrix x(random_matrix(5, 1, rng));
  const auto y = validate_quantile_matrix(random_quantile_rows(4, 3, rng));
  EXPECT_THROW(fit_frechet(x, y, {}), InvalidArgument);
}

TEST(FitFrechet, SimulationRespectsLowerBound) {
  const auto sim = generate_zinbinom_qf(100, 100, 10, 1);
  const auto fit = fit_frechet(sim.X, sim.Y, {0.0, kInf});
  const auto& q = fit.Qhat.values();
  EXPECT_GE(q.minCoeff(), 0.0);
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index k = 1; k < q.cols(); ++k) {
      EXPECT_GE(q(i, k), q(i, k - 1));
    }
  }
  // The unconstrained fit does dip below zero, so the bound is doing work.
  const auto raw = frechet_hat_matrix(center_design(sim.X)) * sim.Y.values();
  EXPECT_LT(raw.minCoeff(), 0.0);
  EXPECT_EQ(fit.active_sets.size(), 100u);
}

TEST(FitFrechet, MeanPreservationWithoutBounds) {
  RandomStream rng(5, 0);
  const CovariateMatrix x(random_matrix(30, 3, rng));
  const auto y = validate_quantile_matrix(random_quantile_rows(30, 8, rng));
  const Eigen::MatrixXd raw = frechet_hat_matrix(center_design(x)) * y.values();
  EXPECT_LT(max_abs(raw.colwise().mean() - y.values().colwise().mean()), 1e-10);
}

TEST(FitFrechet, PermutationEquivariance) {
  RandomStream rng(6, 0);
  const std::size_t n = 25;
  const RowMatrix x = random_matrix(n, 2, rng);
  const RowMatrix y = random_quantile_rows(n, 6, rng);
  const auto perm = rng.permutation(n);
  RowMatrix xp(x.rows(), x.cols()), yp(y.rows(), y.cols());
  for (std::size_t i = 0; i < n; ++i) {
    xp.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(perm[i]));
    yp.row(static_cast<Eigen::Index>(i)) = y.row(static_cast<Eigen::Index>(perm[i]));
  }
  const SupportBounds b(-0.5, 1.0);
  const auto base = fit_frechet(CovariateMatrix(x), validate_quantile_matrix(y), b);
  const auto permuted = fit_frechet(CovariateMatrix(xp), validate_quantile_matrix(yp), b);
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_LT(max_abs(permuted.Qhat.values().row(static_cast<Eigen::Index>(i)) -
                      base.Qhat.values().row(static_cast<Eigen::Index>(perm[i]))),
              1e-10);
  }
}

TEST(FitFrechet, ThreadCountDoesNotChangeOutput) {
  const auto sim = generate_zinbinom_qf(60, 50, 5, 9);
  const auto one = fit_frechet(sim.X, sim.Y, {0.0, kInf}, 1);
  const auto four = fit_frechet(sim.X, sim.Y, {0.0, kInf}, 4);
  EXPECT_EQ(one.Qhat.values(), four.Qhat.values());
  EXPECT_EQ(one.active_sets, four.active_sets);
  EXPECT_EQ(one.qp_iterations, four.qp_iterations);
}

TEST(PredictFrechet, TrainingPointsReproduceFit) {
  RandomStream rng(7, 0);
  const CovariateMatrix x(random_matrix(20, 3, rng));
  const auto y = validate_quantile_matrix(random_quantile_rows(20, 7, rng));
  const SupportBounds b(-1.0, kInf);
  const auto fit = fit_frechet(x, y, b);
  const auto pred = predict_frechet(x, y, b, x.values());
  EXPECT_LT(max_abs(pred.values() - fit.Qhat.values()), 1e-10);
}

TEST(PredictFrechet, MeanPointGivesProjectedMean) {
  RandomStream rng(8, 0);
  const CovariateMatrix x(random_matrix(15, 2, rng));
  const auto y = validate_quantile_matrix(random_quantile_rows(15, 5, rng));
  const SupportBounds b(0.0, 0.4);
  const RowMatrix xbar = x.values().colwise().mean();
  const auto pred = predict_frechet(x, y, b, xbar);
  const Vector ybar = y.values().colwise().mean().transpose();
  const Vector expected = pava_clip_oracle(ybar, b);
  EXPECT_LT((pred.values().row(0).transpose() - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PredictFrechet, MatchesDenseWeights) {
  RandomStream rng(9, 0);
  const std::size_t n = 20, p = 3, m = 6;
  const RowMatrix xall = random_matrix(n + 1, p, rng);
  const RowMatrix x = xall.topRows(n);
  const RowMatrix xnew = xall.bottomRows(1);
  const RowMatrix y = random_quantile_rows(n, m, rng);

  const Eigen::RowVectorXd xbar = x.colwise().mean();
  const Eigen::MatrixXd xc = x.rowwise() - xbar;
  const Eigen::MatrixXd sigma = xc.transpose() * xc / static_cast<double>(n);
  const Eigen::MatrixXd sinv = sigma.inverse();
  Vector raw = Vector::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < n; ++i) {
    const double s = 1.0 + ((xnew.row(0) - xbar) * sinv *
                            (x.row(static_cast<Eigen::Index>(i)) - xbar).transpose())(0, 0);
    raw += s * y.row(static_cast<Eigen::Index>(i)).transpose() / static_cast<double>(n);
  }
  const SupportBounds b(-0.2, 0.9);
  const auto pred = predict_frechet(CovariateMatrix(x), validate_quantile_matrix(y), b, xnew);
  EXPECT_LT((pred.values().row(0).transpose() - pava_clip_oracle(raw, b)).cwiseAbs().maxCoeff(),
            1e-10);
}

TEST(PredictFrechet, ColumnMismatch) {
  RandomStream rng(10, 0);
  const CovariateMatrix x(random_matrix(10, 2, rng));
  const auto y = validate_quantile_matrix(random_quantile_rows(10, 3, rng));
  EXPECT_THROW(predict_frechet(x, y, {}, RowMatrix::Zero(1, 3)), InvalidArgument);
}

TEST(ProjectRows, WarmStartsMustMatchRowCount) {
  const RowMatrix raw = RowMatrix::Zero(3, 2);
  const std::vector<ActiveSet> warm(2);
  EXPECT_THROW(project_rows(raw, {}, &warm), InvalidArgument);
}
