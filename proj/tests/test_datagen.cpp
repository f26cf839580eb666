#include "fastfrechet/datagen.hpp"
#include "fastfrechet/errors.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <utility>

using namespace fastfrechet;

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

// Smallest k with pi0 + (1 - pi0) F_NB(k) >= u, with the NB pmf built by the
// ratio recursion p(k+1) = p(k) (k + r) / (k + 1) * mu / (r + mu) in 50 digits.
double zinb_quantile_oracle(double u, double pi0, double r, double mu) {
  const Big br(r), bmu(mu), bpi0(pi0), bu(u);
  const Big ratio = bmu / (br + bmu);
  Big pmf = boost::multiprecision::pow(br / (br + bmu), br);
  Big cdf = pmf;
  for (int k = 0; k < 100000; ++k) {
    if (bpi0 + (1 - bpi0) * cdf >= bu) {
      return k;
    }
    pmf *= (Big(k) + br) / Big(k + 1) * ratio;
    cdf += pmf;
  }
  return -1.0;
}

}  // namespace

TEST(ZinbQuantile, PointMassAtZero) {
  const ZinbParams params{1.0 - 1e-12, 2.0, 5.0};
  const auto grid = make_grid(100);
  for (double u : grid.levels()) {
    EXPECT_EQ(zinb_quantile(u, params), 0.0);
  }
}

TEST(ZinbQuantile, GeometricMedian) {
  // Geometric with success probability 1/2 has F(0) = 1/2 exactly.
  EXPECT_EQ(zinb_quantile(0.5, {0.0, 1.0, 1.0}), 0.0);
  EXPECT_EQ(zinb_quantile(0.5 + 1e-9, {0.0, 1.0, 1.0}), 1.0);
  EXPECT_EQ(zinb_quantile(0.75, {0.0, 1.0, 1.0}), 1.0);
  EXPECT_EQ(zinb_quantile(0.8, {0.0, 1.0, 1.0}), 2.0);
}

TEST(ZinbQuantile, MatchesMultiprecisionOracle) {
  const std::pair<ZinbParams, const char*> cases[] = {
      {{0.3, 2.0, 5.0}, "reference"},      {{0.0, 0.5, 20.0}, "overdispersed"},
      {{0.7, 10.0, 1.5}, "heavy zero"},   {{0.1, 50.0, 40.0}, "near Poisson"},
      {{0.0, 0.05, 3.0}, "tiny size"},     {{0.25, 1.0, 200.0}, "large mean"},
  };
  const auto grid = make_grid(100);
  for (const auto& [params, label] : cases) {
    double prev = 0.0;
    for (double u : grid.levels()) {
      const double q = zinb_quantile(u, params);
      EXPECT_EQ(q, zinb_quantile_oracle(u, params.pi0, params.r, params.mu)) << label << " u=" << u;
      EXPECT_EQ(q, std::floor(q));
      EXPECT_GE(q, prev);
      prev = q;
    }
  }
}

TEST(ZinbQuantile, ReferenceSweepStartsAtZero) {
  const ZinbParams params{0.3, 2.0, 5.0};
  const auto grid = make_grid(100);
  EXPECT_EQ(zinb_quantile(grid[0], params), 0.0);
  EXPECT_EQ(zinb_quantile(grid[10], params), 0.0);
  EXPECT_GT(zinb_quantile(grid[99], params), 5.0);
}

TEST(ZinbQuantile, RejectsOutOfRange) {
  const ZinbParams params{0.3, 2.0, 5.0};
  EXPECT_THROW(zinb_quantile(0.0, params), InvalidArgument);
  EXPECT_THROW(zinb_quantile(1.0, params), InvalidArgument);
  EXPECT_THROW(zinb_quantile(std::nan(""), params), InvalidArgument);
  EXPECT_THROW(zinb_quantile(0.5, {1.0, 2.0, 5.0}), InvalidArgument);
  EXPECT_THROW(zinb_quantile(0.5, {0.2, 0.0, 5.0}), InvalidArgument);
  EXPECT_THROW(zinb_quantile(0.5, {0.2, 1.0, -1.0}), InvalidArgument);
}

TEST(GenerateZinbinomQf, Defaults) {
  const auto sim = generate_zinbinom_qf(100, 100, 10, 1);
  ASSERT_EQ(sim.X.rows(), 100u);
  ASSERT_EQ(sim.X.cols(), 10u);
  ASSERT_EQ(sim.Y.rows(), 100u);
  ASSERT_EQ(sim.Y.cols(), 100u);
  const auto& x = sim.X.values();
  EXPECT_GT(x.minCoeff(), -1.0);
  EXPECT_LT(x.maxCoeff(), 1.0);
  const auto& y = sim.Y.values();
  EXPECT_GE(y.minCoeff(), 0.0);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index k = 0; k < y.cols(); ++k) {
      EXPECT_EQ(y(i, k), std::floor(y(i, k)));
      if (k > 0) {
        EXPECT_GE(y(i, k), y(i, k - 1));
      }
    }
  }
}

TEST(GenerateZinbinomQf, SeedDeterminism) {
  const auto a = generate_zinbinom_qf(30, 20, 6, 42);
  const auto b = generate_zinbinom_qf(30, 20, 6, 42);
  const auto c = generate_zinbinom_qf(30, 20, 6, 43);
  EXPECT_EQ(a.X.values(), b.X.values());
  EXPECT_EQ(a.Y.values(), b.Y.values());
  EXPECT_NE(a.X.values(), c.X.values());
}

TEST(GenerateZinbinomQf, RowsDependOnlyOnSeedAndIndex) {
  const auto small = generate_zinbinom_qf(5, 10, 6, 7);
  const auto large = generate_zinbinom_qf(12, 10, 6, 7);
  EXPECT_EQ(small.X.values(), large.X.values().topRows(5));
  EXPECT_EQ(small.Y.values(), large.Y.values().topRows(5));
}

TEST(GenerateZinbinomQf, NoiseCovariatesDoNotEnter) {
  const auto sim = generate_zinbinom_qf(40, 30, 8, 3);
  RowMatrix shuffled = sim.X.values();
  // Reverse the rows of the noise block so every subject gets other noise.
  shuffled.rightCols(4) = sim.X.values().rightCols(4).colwise().reverse().eval();
  const auto y = zinbinom_qf_from_covariates(CovariateMatrix(shuffled), 30);
  EXPECT_EQ(y.values(), sim.Y.values());
}

TEST(GenerateZinbinomQf, SignalCovariatesDoEnter) {
  const auto sim = generate_zinbinom_qf(40, 30, 4, 3);
  for (Eigen::Index j = 0; j < 4; ++j) {
    RowMatrix moved = sim.X.values();
    moved.col(j) = moved.col(j).reverse().eval();
    EXPECT_NE(zinbinom_qf_from_covariates(CovariateMatrix(moved), 30).values(), sim.Y.values())
        << "covariate " << j + 1;
  }
}

TEST(GenerateZinbinomQf, RejectsBadShapes) {
  EXPECT_THROW(generate_zinbinom_qf(10, 10, 3, 1), InvalidArgument);
  EXPECT_THROW(generate_zinbinom_qf(1, 10, 4, 1), InvalidArgument);
  EXPECT_THROW(generate_zinbinom_qf(10, 0, 4, 1), InvalidArgument);
}
