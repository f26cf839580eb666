#pragma once

#include "fastfrechet/core.hpp"

#include <cstddef>
#include <cstdint>

namespace fastfrechet {

/// Zero-inflated negative binomial: point mass pi0 at zero mixed with
/// NB(mean mu, size r), whose variance is mu + mu^2 / r.
struct ZinbParams {
  double pi0 = 0.0;
  double r = 1.0;
  double mu = 1.0;

  /// Throws InvalidArgument unless 0 <= pi0 < 1, r > 0, mu > 0.
  void validate() const;
};

/// Generalized inverse CDF of the ZINB distribution at u in (0,1), by CDF
/// accumulation. Accumulation stops once the remaining tail mass is below
/// 1e-12 or k exceeds mu + 20 sd; larger quantiles are clamped to that k.
double zinb_quantile(double u, const ZinbParams& params);

/// Per-subject ZINB parameters driven by the first four covariates:
///   pi0 = logistic(-0.5 + 3.5 x1), mu = exp(1.5 + 0.6 x2 + 0.6 x3), r = exp(0.5 + 2.5 x4).
/// The coefficients balance the four effects in W2 units so each is
/// recoverable by stability selection at n = 100.
ZinbParams zinbinom_params(std::span<const double> x);

/// Quantile responses for given covariates (p >= 4) on the midpoint grid of size m.
QuantileMatrix zinbinom_qf_from_covariates(const CovariateMatrix& X, std::size_t m);

struct SimulatedData {
  CovariateMatrix X;
  QuantileMatrix Y;
};

/// Covariates iid Uniform(-1, 1); row i draws from RandomStream(seed, i).
/// Only the first four covariates affect the responses.
SimulatedData generate_zinbinom_qf(std::size_t n, std::size_t m, std::size_t p, std::uint64_t seed);

}  // namespace fastfrechet
