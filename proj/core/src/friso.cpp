#include "fastfrechet/friso.hpp"

#include "fastfrechet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace fastfrechet {

namespace {

// Arc length of the curvature probe.
constexpr double kProbeAngle = 1e-4;
// Longest arc tried by one step; also the step when curvature is not positive.
constexpr double kMaxAngle = std::numbers::pi / 4.0;
// Components of lambda below this fraction of tau are reported as zero.
constexpr double kZeroClamp = 1e-10;
// Reactivation: coordinates with lambda_j <= level * tau whose derivative is
// below the simplex multiplier by more than the tolerance receive `share` of tau.
constexpr double kReactivateLevel = 1e-6;
constexpr double kReactivateTolerance = 1e-6;
constexpr double kReactivateShare = 1e-3;
// Backtracking gives up once the first-order predicted decrease is below one
// ulp of F; smaller changes are lost to rounding in F itself.
constexpr double kResolvableDecrease = std::numeric_limits<double>::epsilon();

void check_shapes(const CovariateMatrix& X, const QuantileMatrix& Y) {
  if (X.rows() != Y.rows()) {
    throw InvalidArgument("covariates have " + std::to_string(X.rows()) +
                          " rows but responses have " + std::to_string(Y.rows()));
  }
}

Vector project_tangent(const Vector& w, Vector v) {
  v -= w.dot(v) * w;
  return v;
}

// Trial points drop coordinates below the reporting clamp onto the face.
SpherePoint snap_to_face(const SpherePoint& point) {
  Vector w = point.w();
  const double cutoff = kZeroClamp;
  bool changed = false;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w[j] != 0.0 && w[j] * w[j] < cutoff) {
      w[j] = 0.0;
      changed = true;
    }
  }
  return changed ? SpherePoint(std::move(w), point.tau()) : point;
}

SimplexWeights clamp_weights(const SpherePoint& point) {
  Vector lambda = point.lambda();
  const double cutoff = kZeroClamp * point.tau();
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    if (lambda[j] < cutoff) {
      lambda[j] = 0.0;
    }
  }
  return SimplexWeights(point.tau(), std::move(lambda));
}

}  // namespace

SpherePoint::SpherePoint(Vector w, double tau) : w_(std::move(w)), tau_(tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument("tau must be a positive finite number");
  }
  const double norm = w_.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidArgument("sphere point needs a finite non-zero vector");
  }
  w_ /= norm;
}

SpherePoint SpherePoint::uniform(std::size_t p, double tau) {
  if (p == 0) {
    throw InvalidArgument("sphere dimension must be positive");
  }
  return SpherePoint(Vector::Constant(static_cast<Eigen::Index>(p), 1.0), tau);
}

SpherePoint SpherePoint::from_weights(const SimplexWeights& lambda) {
  return SpherePoint((lambda.lambda() / lambda.tau()).cwiseSqrt(), lambda.tau());
}

void DescentConfig::validate() const {
  if (!(epsilon > 0.0)) {
    throw InvalidArgument("epsilon must be positive");
  }
  if (!(impulse >= 0.0 && impulse < 1.0)) {
    throw InvalidArgument("impulse must lie in [0, 1)");
  }
  if (max_iter == 0) {
    throw InvalidArgument("max_iter must be positive");
  }
  if (!(step_shrink > 0.0 && step_shrink < 1.0)) {
    throw InvalidArgument("step_shrink must lie in (0, 1)");
  }
}

Eigen::MatrixXd ridge_matrix(const Eigen::MatrixXd& Sigma, const Vector& lambda) {
  const Eigen::Index p = Sigma.rows();
  if (Sigma.cols() != p || lambda.size() != p) {
    throw InvalidArgument("ridge_matrix: dimension mismatch");
  }
  if ((lambda.array() < 0.0).any()) {
    throw InvalidArgument("ridge_matrix: lambda must be non-negative");
  }
  const Vector s = lambda.cwiseSqrt();
  Eigen::MatrixXd inner = s.asDiagonal() * Sigma * s.asDiagonal();
  inner.diagonal().array() += 1.0;
  const Eigen::LLT<Eigen::MatrixXd> llt(inner);
  Eigen::MatrixXd A = s.asDiagonal() * llt.solve(Eigen::MatrixXd(s.asDiagonal()));
  return 0.5 * (A + A.transpose());
}

Eigen::MatrixXd weighted_hat(const CenteredDesign& design, const Vector& lambda) {
  const Eigen::MatrixXd A = ridge_matrix(design.Sigma, lambda);
  Eigen::MatrixXd H = design.Xc * A * design.Xc.transpose();
  H.array() += 1.0;
  H /= static_cast<double>(design.n());
  return H;
}

FrisoProblem::FrisoProblem(const CovariateMatrix& X, const QuantileMatrix& Y, SupportBounds bounds,
                           std::size_t threads)
    : Y_(Y.values()), bounds_(bounds), threads_(threads) {
  check_shapes(X, Y);
  design_ = center_design(X);
  Ybar_ = Y_.colwise().mean();
  // Xc' 1 = 0, so centering Y changes nothing in exact arithmetic but keeps
  // G exactly zero when all rows coincide.
  G_ = design_.Xc.transpose() * (Y_.rowwise() - Ybar_) / static_cast<double>(design_.n());
}

RowMatrix FrisoProblem::raw_fit(const Vector& lambda) const {
  const Eigen::MatrixXd A = ridge_matrix(design_.Sigma, lambda);
  RowMatrix raw = design_.Xc * (A * G_);
  raw.rowwise() += Ybar_;
  return raw;
}

ObjectiveState FrisoProblem::objective(const Vector& lambda,
                                       const std::vector<ActiveSet>* warm) const {
  ObjectiveState st;
  st.ridge = ridge_matrix(design_.Sigma, lambda);
  RowMatrix raw = design_.Xc * (st.ridge * G_);
  raw.rowwise() += Ybar_;
  FrechetFit fit = project_rows(raw, bounds_, warm, threads_);
  st.Qhat = fit.Qhat.values();
  st.active_sets = std::move(fit.active_sets);
  st.qp_iterations = fit.qp_iterations;
  st.value = (st.Qhat - Y_).squaredNorm() / static_cast<double>(m());
  return st;
}

Vector FrisoProblem::lambda_gradient(const ObjectiveState& state) const {
  // dA/dlambda_j = v_j v_j' with v_j the j-th column of V = I - A Sigma,
  // which stays finite at lambda_j = 0. The projection is linear at a fixed
  // active set with symmetric Jacobian B_i, so
  //   dF/dlambda_j = (2/m) sum_i (Xc V)_ij * (B_i r_i) . (V' G)_j
  // with r_i = Qhat_i - Y_i.
  const auto p = static_cast<Eigen::Index>(this->p());
  const auto nrows = static_cast<Eigen::Index>(n());
  const Eigen::MatrixXd V = Eigen::MatrixXd::Identity(p, p) - state.ridge * design_.Sigma;
  const Eigen::MatrixXd U = design_.Xc * V;
  const Eigen::MatrixXd Z = V.transpose() * G_;

  RowMatrix P = state.Qhat - Y_;
  for (Eigen::Index i = 0; i < nrows; ++i) {
    apply_projection_jacobian(state.active_sets[static_cast<std::size_t>(i)], bounds_,
                              std::span<double>(P.data() + i * P.cols(),
                                                static_cast<std::size_t>(P.cols())));
  }
  const Eigen::MatrixXd PZt = P * Z.transpose();
  return (2.0 / static_cast<double>(m())) * U.cwiseProduct(PZt).colwise().sum().transpose();
}

Vector FrisoProblem::tangent_gradient(const SpherePoint& point, const ObjectiveState& state) const {
  const Vector g_lambda = lambda_gradient(state);
  const Vector g_w = 2.0 * point.tau() * g_lambda.cwiseProduct(point.w());
  return project_tangent(point.w(), g_w);
}

RowMatrix FrisoProblem::predict(const Vector& lambda, const RowMatrix& Xnew) const {
  if (static_cast<std::size_t>(Xnew.cols()) != p()) {
    throw InvalidArgument("prediction points have " + std::to_string(Xnew.cols()) +
                          " columns, expected " + std::to_string(p()));
  }
  const Eigen::MatrixXd A = ridge_matrix(design_.Sigma, lambda);
  const RowMatrix D = Xnew.rowwise() - design_.xbar.transpose();
  RowMatrix raw = D * (A * G_);
  raw.rowwise() += Ybar_;
  return project_rows(raw, bounds_, nullptr, threads_).Qhat.values();
}

ObjectiveState friso_objective(const SpherePoint& point, const CovariateMatrix& X,
                               const QuantileMatrix& Y, SupportBounds bounds,
                               const std::vector<ActiveSet>* warm) {
  return FrisoProblem(X, Y, bounds).objective(point, warm);
}

Vector friso_gradient(const SpherePoint& point, const CovariateMatrix& X, const QuantileMatrix& Y,
                      SupportBounds bounds, const ObjectiveState& state) {
  return FrisoProblem(X, Y, bounds).tangent_gradient(point, state);
}

SpherePoint geodesic_step(const SpherePoint& point, const Vector& direction, double alpha) {
  const double dnorm = direction.norm();
  if (dnorm == 0.0 || alpha == 0.0) {
    return point;
  }
  const double theta = alpha * dnorm;
  Vector w = point.w() * std::cos(theta) + (direction / dnorm) * std::sin(theta);
  return SpherePoint(std::move(w), point.tau());
}

Vector transport(const SpherePoint& point, const Vector& direction, double alpha, const Vector& v) {
  const double dnorm = direction.norm();
  if (dnorm == 0.0 || alpha == 0.0) {
    return v;
  }
  // Only the component of v along the geodesic rotates; the rest is constant.
  const Vector u = direction / dnorm;
  const double theta = alpha * dnorm;
  const double along = u.dot(v);
  return v + along * ((std::cos(theta) - 1.0) * u - std::sin(theta) * point.w());
}

FrisoResult solve_friso(const FrisoProblem& problem, double tau, const DescentConfig& config,
                        const std::optional<SpherePoint>& init,
                        const std::vector<ActiveSet>* warm, const IterationObserver& observer) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument("tau must be a positive finite number");
  }
  config.validate();
  const std::size_t p = problem.p();
  if (init && init->size() != p) {
    throw InvalidArgument("initial sphere point has the wrong dimension");
  }

  SpherePoint point = init ? init->with_tau(tau) : SpherePoint::uniform(p, tau);
  ObjectiveState state = problem.objective(point, warm);
  std::size_t qp_total = state.qp_iterations;
  std::vector<double> history{state.value};

  auto finish = [&](std::size_t iterations, bool converged, double gnorm) {
    SimplexWeights weights = clamp_weights(point);
    // Report the objective at the clamped weights so value and fits agree.
    ObjectiveState final_state = problem.objective(weights.lambda(), &state.active_sets);
    qp_total += final_state.qp_iterations;
    return FrisoResult{std::move(weights),
                       final_state.value,
                       iterations,
                       converged,
                       std::move(final_state.active_sets),
                       gnorm,
                       point,
                       qp_total,
                       std::move(history)};
  };

  if (p == 1) {
    return finish(0, true, 0.0);
  }

  Vector grad = problem.tangent_gradient(point, state);
  double gnorm = grad.norm();
  Vector prev_direction = Vector::Zero(static_cast<Eigen::Index>(p));
  std::size_t iter = 0;
  std::size_t reactivations = 0;

  auto evaluate = [&](const SpherePoint& at) {
    ObjectiveState st = problem.objective(at, &state.active_sets);
    qp_total += st.qp_iterations;
    return st;
  };

  auto accept = [&](SpherePoint next, ObjectiveState next_state, double step,
                    std::size_t backtracks) {
    point = std::move(next);
    state = std::move(next_state);
    grad = problem.tangent_gradient(point, state);
    gnorm = grad.norm();
    ++iter;
    history.push_back(state.value);
    if (observer) {
      observer(IterationRecord{iter, state.value, gnorm, step, backtracks, state.qp_iterations});
    }
  };

  // Zero coordinates are fixed points of the sphere flow even when the simplex
  // optimality conditions want them positive. At a stationary point, move a
  // small share of the mass onto the coordinate with the most negative
  // reduced gradient, accepting only if F decreases.
  auto try_reactivate = [&]() {
    if (reactivations >= 2 * p) {
      return false;
    }
    const Vector g = problem.lambda_gradient(state);
    const Vector lambda = point.lambda();
    const double nu = lambda.dot(g) / tau;
    const double tol = kReactivateTolerance * std::max(std::abs(nu), 1.0);
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      if (lambda[j] <= kReactivateLevel * tau && g[j] < nu - tol &&
          (best < 0 || g[j] < g[best])) {
        best = j;
      }
    }
    if (best < 0) {
      return false;
    }
    double share = kReactivateShare;
    for (std::size_t b = 0; b <= config.max_backtracks; ++b, share *= config.step_shrink) {
      Vector moved = (1.0 - share) * lambda;
      moved[best] += share * tau;
      SpherePoint next((moved / tau).cwiseSqrt(), tau);
      ObjectiveState next_state = evaluate(next);
      if (next_state.value < state.value) {
        ++reactivations;
        prev_direction.setZero();
        accept(std::move(next), std::move(next_state), share, b);
        return true;
      }
    }
    return false;
  };

  for (;;) {
    const bool stationary = gnorm <= config.epsilon;
    if (!stationary) {
      if (iter >= config.max_iter) {
        return finish(iter, false, gnorm);
      }

      Vector direction = -grad;
      if (config.impulse > 0.0 && prev_direction.squaredNorm() > 0.0) {
        direction = project_tangent(point.w(), direction + config.impulse * prev_direction);
        if (direction.dot(grad) >= 0.0) {
          direction = -grad;
        }
      }
      const double dnorm = direction.norm();
      const double slope = grad.dot(direction);

      // Directional curvature from the change in slope over a short probe arc.
      const double probe = kProbeAngle / dnorm;
      const SpherePoint probe_point = geodesic_step(point, direction, probe);
      const ObjectiveState probe_state = evaluate(probe_point);
      const Vector probe_grad = problem.tangent_gradient(probe_point, probe_state);
      const double probe_slope = probe_grad.dot(transport(point, direction, probe, direction));
      const double curvature = (probe_slope - slope) / probe;

      const double max_step = kMaxAngle / dnorm;
      double step = curvature > 0.0 ? std::min(-slope / curvature, max_step) : max_step;

      const double resolvable = kResolvableDecrease * std::max(std::abs(state.value), 1.0);
      bool decreased = false;
      for (std::size_t backtracks = 0;
           backtracks <= config.max_backtracks && -slope * step >= resolvable; ++backtracks) {
        SpherePoint trial = snap_to_face(geodesic_step(point, direction, step));
        ObjectiveState trial_state = evaluate(trial);
        if (trial_state.value < state.value) {
          Vector carried = project_tangent(trial.w(), transport(point, direction, step, direction));
          accept(std::move(trial), std::move(trial_state), step, backtracks);
          prev_direction = std::move(carried);
          decreased = true;
          break;
        }
        step *= config.step_shrink;
      }
      if (decreased) {
        continue;
      }
    }

    if (iter < config.max_iter && try_reactivate()) {
      continue;
    }
    return finish(iter, stationary, gnorm);
  }
}

FrisoResult solve_friso(const CovariateMatrix& X, const QuantileMatrix& Y, double tau,
                        SupportBounds bounds, const DescentConfig& config,
                        const std::optional<SpherePoint>& init,
                        const std::vector<ActiveSet>* warm, const IterationObserver& observer) {
  const FrisoProblem problem(X, Y, bounds, config.threads);
  return solve_friso(problem, tau, config, init, warm, observer);
}

PathResult solution_path(const FrisoProblem& problem, const std::vector<double>& tau_grid,
                         const DescentConfig& config, bool warm_start,
                         const IterationObserver& observer) {
  if (tau_grid.empty()) {
    throw InvalidArgument("tau grid is empty");
  }
  for (std::size_t k = 0; k < tau_grid.size(); ++k) {
    if (!(tau_grid[k] > 0.0)) {
      throw InvalidArgument("tau grid values must be positive");
    }
    if (k > 0 && !(tau_grid[k] > tau_grid[k - 1])) {
      throw InvalidArgument("tau grid must be strictly increasing");
    }
  }

  PathResult path;
  path.tau_grid = tau_grid;
  path.lambda.resize(static_cast<Eigen::Index>(problem.p()),
                     static_cast<Eigen::Index>(tau_grid.size()));

  std::optional<SpherePoint> init;
  std::vector<ActiveSet> sets;
  for (std::size_t k = 0; k < tau_grid.size(); ++k) {
    const bool reuse = warm_start && init.has_value();
    FrisoResult res = solve_friso(problem, tau_grid[k], config, reuse ? init : std::nullopt,
                                  reuse ? &sets : nullptr, observer);
    path.lambda.col(static_cast<Eigen::Index>(k)) = res.lambda.lambda();
    path.objective.push_back(res.objective);
    path.iterations.push_back(res.iterations);
    path.converged.push_back(res.converged ? 1 : 0);
    path.gradient_norm.push_back(res.gradient_norm);
    path.qp_iterations += res.qp_iterations;
    init = res.point;
    sets = std::move(res.active_sets);
  }
  return path;
}

PathResult solution_path(const CovariateMatrix& X, const QuantileMatrix& Y,
                         const std::vector<double>& tau_grid, SupportBounds bounds,
                         const DescentConfig& config, bool warm_start,
                         const IterationObserver& observer) {
  const FrisoProblem problem(X, Y, bounds, config.threads);
  return solution_path(problem, tau_grid, config, warm_start, observer);
}

}  // namespace fastfrechet
