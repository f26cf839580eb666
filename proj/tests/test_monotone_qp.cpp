#include "fastfrechet/errors.hpp"
#include "fastfrechet/monotone_qp.hpp"
#include "fastfrechet/random.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

using namespace fastfrechet;
using fastfrechet::testing::exhaustive_projection;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) {
    v[i++] = x;
  }
  return v;
}

Vector random_vector(RandomStream& rng, std::size_t m, double scale = 1.0) {
  Vector v(static_cast<Eigen::Index>(m));
  for (auto& x : v) {
    x = scale * rng.normal();
  }
  return v;
}

SupportBounds random_bounds(RandomStream& rng) {
  switch (rng.below(4)) {
    case 0:
      return {};
    case 1:
      return {0.0, kInf};
    case 2:
      return {-kInf, rng.normal()};
    default: {
      const double lo = rng.normal();
      return {lo, lo + 0.1 + 2.0 * rng.uniform01()};
    }
  }
}

// Stationarity, feasibility, dual sign and complementary slackness.
void expect_kkt(const Vector& a, SupportBounds bounds, const ProjectionResult& r) {
  const auto m = static_cast<std::size_t>(a.size());
  const ConstraintSystem cs(m, bounds);
  ASSERT_EQ(r.dual.size(), r.active.size());
  Vector resid = r.q - a;
  for (std::size_t t = 0; t < r.active.size(); ++t) {
    const std::size_t c = r.active.indices()[t];
    const double mu = r.dual[t];
    EXPECT_GE(mu, -1e-10) << "constraint " << c;
    EXPECT_NEAR(cs.slack(c, {r.q.data(), m}), 0.0, 1e-9) << "constraint " << c;
    if (c == 0) {
      resid[0] -= mu;
    } else if (c == m) {
      resid[static_cast<Eigen::Index>(m) - 1] += mu;
    } else {
      resid[static_cast<Eigen::Index>(c)] -= mu;
      resid[static_cast<Eigen::Index>(c) - 1] += mu;
    }
  }
  EXPECT_LT(resid.lpNorm<Eigen::Infinity>(), 1e-9);
  for (std::size_t k = 0; k < m; ++k) {
    EXPECT_GE(r.q[static_cast<Eigen::Index>(k)], bounds.lower);
    EXPECT_LE(r.q[static_cast<Eigen::Index>(k)], bounds.upper);
    if (k > 0) {
      EXPECT_GE(r.q[static_cast<Eigen::Index>(k)], r.q[static_cast<Eigen::Index>(k) - 1]);
    }
  }
}

}  // namespace

TEST(ProjectMonotone, AlreadyFeasible) {
  const auto r = project_monotone(vec({1, 2, 3}), {});
  EXPECT_EQ(r.q, vec({1, 2, 3}));
  EXPECT_TRUE(r.active.empty());
  EXPECT_EQ(r.iterations, 0u);
}

TEST(ProjectMonotone, DecreasingPairPoolsToMean) {
  const auto r = project_monotone(vec({2, 1}), {});
  EXPECT_DOUBLE_EQ(r.q[0], 1.5);
  EXPECT_DOUBLE_EQ(r.q[1], 1.5);
  EXPECT_EQ(r.active.indices(), std::vector<std::size_t>{1});
  ASSERT_EQ(r.dual.size(), 1u);
  EXPECT_DOUBLE_EQ(r.dual[0], 0.5);
}

TEST(ProjectMonotone, PoolThenClipUpper) {
  const Vector a = vec({3, 1, 2});
  const SupportBounds b(0.0, 1.5);
  const auto oracle = pava_clip_oracle(a, b);
  const auto brute = exhaustive_projection(a, b);
  EXPECT_LT((oracle - vec({1.5, 1.5, 1.5})).lpNorm<Eigen::Infinity>(), 1e-15);
  EXPECT_LT((brute - oracle).lpNorm<Eigen::Infinity>(), 1e-12);
  const auto r = project_monotone(a, b);
  EXPECT_LT((r.q - oracle).lpNorm<Eigen::Infinity>(), 1e-12);
  expect_kkt(a, b, r);
}

TEST(ProjectMonotone, ClipLower) {
  const Vector a = vec({-1, 0.5});
  const SupportBounds b(0.0, kInf);
  const auto oracle = pava_clip_oracle(a, b);
  EXPECT_EQ(oracle, vec({0, 0.5}));
  const auto r = project_monotone(a, b);
  EXPECT_EQ(r.q, vec({0, 0.5}));
  EXPECT_EQ(r.active.indices(), std::vector<std::size_t>{0});
  expect_kkt(a, b, r);
}

TEST(ProjectMonotone, ScalarIsClamp) {
  const SupportBounds b(0.0, 1.0);
  EXPECT_EQ(project_monotone(vec({-2}), b).q[0], 0.0);
  EXPECT_EQ(project_monotone(vec({0.25}), b).q[0], 0.25);
  const auto hi = project_monotone(vec({4}), b);
  EXPECT_EQ(hi.q[0], 1.0);
  EXPECT_EQ(hi.active.indices(), std::vector<std::size_t>{1});
  EXPECT_DOUBLE_EQ(hi.dual[0], 3.0);
  // A stale warm start that pins both bounds is repaired.
  const ActiveSet both({0, 1});
  EXPECT_EQ(project_monotone(vec({0.5}), b, &both).q[0], 0.5);
}

TEST(ProjectMonotone, RejectsNonFinite) {
  EXPECT_THROW(project_monotone(vec({1, std::numeric_limits<double>::quiet_NaN()}), {}),
               InvalidArgument);
  EXPECT_THROW(project_monotone(vec({kInf}), {}), InvalidArgument);
  EXPECT_THROW(pava_clip_oracle(vec({kInf}), {}), InvalidArgument);
}

TEST(PavaClipOracle, Examples) {
  EXPECT_EQ(pava_clip_oracle(vec({2, 1}), {}), vec({1.5, 1.5}));
  EXPECT_EQ(pava_clip_oracle(vec({1, 2, 3}), {0.0, 2.0}), vec({1, 2, 2}));
}

TEST(PavaClipOracle, MatchesExhaustiveSearch) {
  RandomStream rng(2024, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector a = random_vector(rng, 6);
    const SupportBounds b(0.0, 1.0);
    EXPECT_LT((pava_clip_oracle(a, b) - exhaustive_projection(a, b)).lpNorm<Eigen::Infinity>(),
              1e-12);
  }
}

TEST(ProjectMonotone, OracleEquivalenceAndKkt) {
  RandomStream rng(7, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 1 + rng.below(200);
    const Vector a = random_vector(rng, m);
    const SupportBounds b = random_bounds(rng);
    const auto r = project_monotone(a, b);
    ASSERT_LE((r.q - pava_clip_oracle(a, b)).lpNorm<Eigen::Infinity>(), 1e-10)
        << "trial " << trial << " m=" << m;
    expect_kkt(a, b, r);
  }
}

TEST(ProjectMonotone, Idempotent) {
  RandomStream rng(8, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + rng.below(60);
    const SupportBounds b = random_bounds(rng);
    const Vector q = project_monotone(random_vector(rng, m), b).q;
    const auto again = project_monotone(q, b);
    EXPECT_EQ(again.q, q);
    EXPECT_EQ(again.iterations, 0u);
  }
}

TEST(ProjectMonotone, NonExpansive) {
  RandomStream rng(9, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + rng.below(80);
    const SupportBounds b = random_bounds(rng);
    const Vector a = random_vector(rng, m, 2.0);
    const Vector c = random_vector(rng, m, 2.0);
    EXPECT_LE((project_monotone(a, b).q - project_monotone(c, b).q).norm(), (a - c).norm() + 1e-12);
  }
}

TEST(ProjectMonotone, WarmStartGivesColdSolution) {
  RandomStream rng(10, 0);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t m = 1 + rng.below(100);
    const SupportBounds b = random_bounds(rng);
    const Vector a = random_vector(rng, m);
    const auto cold = project_monotone(a, b);

    // The exact final set, a random set, everything, and nothing.
    std::vector<std::size_t> random_idx;
    std::vector<std::size_t> all_idx;
    for (std::size_t c = 0; c <= m + 2; ++c) {
      all_idx.push_back(c);
      if (rng.below(2) == 0) {
        random_idx.push_back(c);
      }
    }
    for (const ActiveSet& warm :
         {cold.active, ActiveSet(random_idx), ActiveSet(all_idx), ActiveSet()}) {
      const auto hot = project_monotone(a, b, &warm);
      ASSERT_LE((hot.q - cold.q).lpNorm<Eigen::Infinity>(), 1e-10) << "trial " << trial;
      expect_kkt(a, b, hot);
    }
    const auto exact = project_monotone(a, b, &cold.active);
    EXPECT_EQ(exact.iterations, 0u);
    EXPECT_EQ(exact.active, cold.active);
  }
}

TEST(ProjectMonotone, WarmStartFromPerturbedProblemIsCheaper) {
  RandomStream rng(12, 0);
  std::vector<double> warm_iters;
  std::vector<double> cold_iters;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 20 + rng.below(180);
    const SupportBounds b = random_bounds(rng);
    const Vector a = random_vector(rng, m);
    Vector delta = Vector::Zero(a.size());
    for (auto& d : delta) {
      d = 1e-3 * (2.0 * rng.uniform01() - 1.0);
    }
    const auto base = project_monotone(a + delta, b);
    const auto cold = project_monotone(a, b);
    const auto hot = project_monotone(a, b, &base.active);
    EXPECT_LE((hot.q - cold.q).lpNorm<Eigen::Infinity>(), 1e-10);
    warm_iters.push_back(static_cast<double>(hot.iterations));
    cold_iters.push_back(static_cast<double>(cold.iterations));
  }
  auto med = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  EXPECT_LE(med(warm_iters), med(cold_iters));
  EXPECT_LT(med(warm_iters), 0.5 * med(cold_iters));
}

TEST(ProjectMonotone, AdversarialInputsStayUnderIterationCap) {
  // Long decreasing ramps force many merges; alternating signs force many
  // small blocks; both bounded variants exercise pin/unpin transitions.
  for (std::size_t m : {2u, 3u, 50u, 500u}) {
    Vector ramp(static_cast<Eigen::Index>(m));
    Vector zigzag(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
      ramp[static_cast<Eigen::Index>(k)] = static_cast<double>(m - k);
      zigzag[static_cast<Eigen::Index>(k)] = (k % 2 == 0 ? 1.0 : -1.0) * static_cast<double>(k);
    }
    for (const SupportBounds& b : {SupportBounds{}, SupportBounds{0.0, 10.0},
                                   SupportBounds{-1.0, 1.0}, SupportBounds{5.0, kInf}}) {
      for (const Vector& a : {ramp, zigzag, Vector(-ramp)}) {
        const auto r = project_monotone(a, b);
        EXPECT_LE((r.q - pava_clip_oracle(a, b)).lpNorm<Eigen::Infinity>(), 1e-10);
        EXPECT_LE(r.iterations, 10 * (m + 1));
      }
    }
  }
}

TEST(ActiveSet, JsonRoundTrip) {
  const ActiveSet s({4, 0, 2, 2});
  EXPECT_EQ(s.to_json(), "[0,2,4]");
  EXPECT_EQ(ActiveSet::from_json(s.to_json()), s);
  EXPECT_THROW(ActiveSet::from_json("[1,"), ParseError);
}

TEST(ProjectionJacobian, MatchesFiniteDifferences) {
  RandomStream rng(13, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 2 + rng.below(30);
    const SupportBounds b = random_bounds(rng);
    const Vector a = random_vector(rng, m);
    const auto base = project_monotone(a, b);
    const Vector dir = random_vector(rng, m);
    const double h = 1e-7;
    const Vector fd = (project_monotone(a + h * dir, b).q - project_monotone(a - h * dir, b).q) / (2 * h);
    Vector jv = dir;
    apply_projection_jacobian(base.active, b, {jv.data(), m});
    // Kinks are measure-zero; random data almost surely avoids them.
    EXPECT_LT((fd - jv).lpNorm<Eigen::Infinity>(), 1e-5) << "trial " << trial;
  }
}
