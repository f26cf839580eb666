#pragma once

#include "fastfrechet/core.hpp"
#include "fastfrechet/frechet.hpp"
#include "fastfrechet/monotone_qp.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace fastfrechet {

/// Unit vector w representing the simplex point lambda = tau * (w o w).
class SpherePoint {
public:
  /// Normalizes w; throws InvalidArgument if w is zero or tau <= 0.
  SpherePoint(Vector w, double tau);

  /// w = 1/sqrt(p), i.e. lambda = tau/p in every coordinate.
  static SpherePoint uniform(std::size_t p, double tau);
  static SpherePoint from_weights(const SimplexWeights& lambda);

  const Vector& w() const noexcept { return w_; }
  double tau() const noexcept { return tau_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(w_.size()); }

  /// tau * (w o w), unclamped.
  Vector lambda() const { return tau_ * w_.cwiseProduct(w_); }
  SpherePoint with_tau(double tau) const { return SpherePoint(w_, tau); }

private:
  Vector w_;
  double tau_;
};

struct DescentConfig {
  /// Stop once the tangent-gradient norm is at most epsilon.
  double epsilon = 1e-6;
  /// Momentum coefficient in [0, 1); 0 is plain geodesic descent.
  double impulse = 0.0;
  std::size_t max_iter = 500;
  double step_shrink = 0.5;
  std::size_t max_backtracks = 30;
  /// Workers for per-row projections (0 = all cores).
  std::size_t threads = 1;

  /// Throws InvalidArgument naming the first out-of-range field.
  void validate() const;
};

/// One accepted descent iteration.
struct IterationRecord {
  std::size_t iteration = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
  double step = 0.0;
  std::size_t backtracks = 0;
  /// Projection working-set changes spent on the accepted evaluation.
  std::size_t active_set_changes = 0;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

struct FrisoResult {
  SimplexWeights lambda;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<ActiveSet> active_sets;
  double gradient_norm = 0.0;
  /// Final iterate before zero-clamping; warm-starts the next tau on a path.
  SpherePoint point;
  /// Projection working-set changes over the whole solve.
  std::size_t qp_iterations = 0;
  /// Accepted objective values, starting with the initial point.
  std::vector<double> history;
};

/// A(lambda) = L (L Sigma L + I)^{-1} L with L = diag(sqrt(lambda)).
/// Equals (Sigma + diag(lambda)^{-1})^{-1} when every lambda_j > 0 and has
/// zero row and column j when lambda_j = 0.
Eigen::MatrixXd ridge_matrix(const Eigen::MatrixXd& Sigma, const Vector& lambda);

/// H(lambda) = (1/n) (11' + Xc A(lambda) Xc').
Eigen::MatrixXd weighted_hat(const CenteredDesign& design, const Vector& lambda);

/// Objective value and the projected fits that produced it.
struct ObjectiveState {
  double value = 0.0;
  RowMatrix Qhat;
  std::vector<ActiveSet> active_sets;
  std::size_t qp_iterations = 0;
  /// A(lambda) at the evaluation point, reused by the gradient.
  Eigen::MatrixXd ridge;
};

/// Precomputed data for repeated objective and gradient evaluations on a
/// fixed (X, Y, bounds).
class FrisoProblem {
public:
  FrisoProblem(const CovariateMatrix& X, const QuantileMatrix& Y, SupportBounds bounds,
               std::size_t threads = 1);

  std::size_t n() const noexcept { return design_.n(); }
  std::size_t p() const noexcept { return design_.p(); }
  std::size_t m() const noexcept { return static_cast<std::size_t>(Y_.cols()); }
  const CenteredDesign& design() const noexcept { return design_; }
  SupportBounds bounds() const noexcept { return bounds_; }

  /// Unprojected fitted rows H(lambda) Y.
  RowMatrix raw_fit(const Vector& lambda) const;

  /// F(lambda) = sum_i W2^2(Qhat_i(lambda), Y_i) with optional per-row warm starts.
  ObjectiveState objective(const Vector& lambda, const std::vector<ActiveSet>* warm = nullptr) const;
  ObjectiveState objective(const SpherePoint& point,
                           const std::vector<ActiveSet>* warm = nullptr) const {
    return objective(point.lambda(), warm);
  }

  /// dF/dlambda at a fixed projection active set.
  Vector lambda_gradient(const ObjectiveState& state) const;

  /// Riemannian gradient on the sphere: the chain rule through
  /// lambda = tau (w o w) followed by projection onto the tangent space at w.
  Vector tangent_gradient(const SpherePoint& point, const ObjectiveState& state) const;

  /// Projected weighted predictions at new covariate rows:
  /// Ybar + (x - xbar)' A(lambda) Xc' Y / n.
  RowMatrix predict(const Vector& lambda, const RowMatrix& Xnew) const;

private:
  CenteredDesign design_;
  RowMatrix Y_;
  Eigen::RowVectorXd Ybar_;
  /// Xc' (Y - 1 Ybar) / n
  Eigen::MatrixXd G_;
  SupportBounds bounds_;
  std::size_t threads_;
};

/// Convenience wrappers matching the one-shot call pattern.
ObjectiveState friso_objective(const SpherePoint& point, const CovariateMatrix& X,
                               const QuantileMatrix& Y, SupportBounds bounds,
                               const std::vector<ActiveSet>* warm = nullptr);
Vector friso_gradient(const SpherePoint& point, const CovariateMatrix& X, const QuantileMatrix& Y,
                      SupportBounds bounds, const ObjectiveState& state);

/// Moves along the great circle through w with initial velocity `direction`
/// (tangent at w) for parameter alpha.
SpherePoint geodesic_step(const SpherePoint& point, const Vector& direction, double alpha);

/// Parallel transport of `v` (tangent at point) along the geodesic
/// generated by `direction` for parameter alpha.
Vector transport(const SpherePoint& point, const Vector& direction, double alpha, const Vector& v);

/// Minimizes F over the tau-simplex by second-order geodesic descent on the
/// unit sphere. Each iteration estimates the curvature of F along the
/// geodesic from one extra gradient evaluation at a short probe step, takes
/// the resulting Newton step (capped at a quarter-pi arc) and backtracks
/// until F decreases. Projection active sets from the current iterate
/// warm-start every trial evaluation.
FrisoResult solve_friso(const FrisoProblem& problem, double tau, const DescentConfig& config,
                        const std::optional<SpherePoint>& init = std::nullopt,
                        const std::vector<ActiveSet>* warm = nullptr,
                        const IterationObserver& observer = {});

FrisoResult solve_friso(const CovariateMatrix& X, const QuantileMatrix& Y, double tau,
                        SupportBounds bounds, const DescentConfig& config,
                        const std::optional<SpherePoint>& init = std::nullopt,
                        const std::vector<ActiveSet>* warm = nullptr,
                        const IterationObserver& observer = {});

struct PathResult {
  std::vector<double> tau_grid;
  /// p x |grid|; column k is lambda-hat(tau_k).
  Eigen::MatrixXd lambda;
  std::vector<double> objective;
  std::vector<std::size_t> iterations;
  std::vector<char> converged;
  std::vector<double> gradient_norm;
  /// Projection working-set changes summed over the whole path.
  std::size_t qp_iterations = 0;
};

/// Solves along an increasing tau grid. With warm_start, the sphere point and
/// active sets at tau_k initialize tau_{k+1}; otherwise every tau starts from
/// the uniform point with cold projections.
PathResult solution_path(const FrisoProblem& problem, const std::vector<double>& tau_grid,
                         const DescentConfig& config, bool warm_start = true,
                         const IterationObserver& observer = {});

PathResult solution_path(const CovariateMatrix& X, const QuantileMatrix& Y,
                         const std::vector<double>& tau_grid, SupportBounds bounds,
                         const DescentConfig& config, bool warm_start = true,
                         const IterationObserver& observer = {});

}  // namespace fastfrechet
