#include "fastfrechet/datagen.hpp"

#include "fastfrechet/errors.hpp"
#include "fastfrechet/random.hpp"

#include <cmath>
#include <string>

namespace fastfrechet {

void ZinbParams::validate() const {
  if (!(pi0 >= 0.0 && pi0 < 1.0)) {
    throw InvalidArgument("zinb pi0 must lie in [0, 1)");
  }
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw InvalidArgument("zinb size r must be positive");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw InvalidArgument("zinb mean mu must be positive");
  }
}

double zinb_quantile(double u, const ZinbParams& params) {
  if (!(u > 0.0 && u < 1.0)) {
    throw InvalidArgument("zinb_quantile: u must lie in (0, 1)");
  }
  params.validate();
  const double r = params.r;
  const double mu = params.mu;
  const double keep = 1.0 - params.pi0;
  const double k_max = std::floor(mu + 20.0 * std::sqrt(mu + mu * mu / r));

  // NB pmf recursion: P(0) = (r/(r+mu))^r, P(k+1) = P(k) (k+r)/(k+1) mu/(r+mu).
  const double ratio = mu / (r + mu);
  double pmf = std::pow(r / (r + mu), r);
  double cdf = pmf;
  double k = 0.0;
  while (params.pi0 + keep * cdf < u) {
    if (1.0 - cdf < 1e-12 || k >= k_max) {
      break;
    }
    pmf *= (k + r) / (k + 1.0) * ratio;
    cdf += pmf;
    k += 1.0;
  }
  return k;
}

ZinbParams zinbinom_params(std::span<const double> x) {
  if (x.size() < 4) {
    throw InvalidArgument("zinbinom responses need at least 4 covariates");
  }
  ZinbParams out;
  out.pi0 = 1.0 / (1.0 + std::exp(-(-0.5 + 3.5 * x[0])));
  out.mu = std::exp(1.5 + 0.6 * x[1] + 0.6 * x[2]);
  out.r = std::exp(0.5 + 2.5 * x[3]);
  return out;
}

QuantileMatrix zinbinom_qf_from_covariates(const CovariateMatrix& X, std::size_t m) {
  if (X.cols() < 4) {
    throw InvalidArgument("zinbinom simulation needs p >= 4, got p = " + std::to_string(X.cols()));
  }
  const ProbabilityGrid grid = make_grid(m);
  RowMatrix Y(static_cast<Eigen::Index>(X.rows()), static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    const ZinbParams params = zinbinom_params(row_span(X.values(), i));
    for (std::size_t k = 0; k < m; ++k) {
      Y(i, static_cast<Eigen::Index>(k)) = zinb_quantile(grid[k], params);
    }
  }
  return validate_quantile_matrix(std::move(Y));
}

SimulatedData generate_zinbinom_qf(std::size_t n, std::size_t m, std::size_t p,
                                   std::uint64_t seed) {
  if (p < 4) {
    throw InvalidArgument("zinbinom simulation needs p >= 4, got p = " + std::to_string(p));
  }
  if (n < 2) {
    throw InvalidArgument("zinbinom simulation needs n >= 2");
  }
  if (m < 1) {
    throw InvalidArgument("zinbinom simulation needs m >= 1");
  }
  RowMatrix X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(seed, i);
    for (std::size_t j = 0; j < p; ++j) {
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.uniform(-1.0, 1.0);
    }
  }
  CovariateMatrix cov(std::move(X));
  QuantileMatrix Y = zinbinom_qf_from_covariates(cov, m);
  return SimulatedData{std::move(cov), std::move(Y)};
}

}  // namespace fastfrechet
