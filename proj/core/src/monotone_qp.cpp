#include "fastfrechet/monotone_qp.hpp"

#include "fastfrechet/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace fastfrechet {

namespace {

// Absolute tolerance for calling a constraint violated or a multiplier negative.
constexpr double kTol = 1e-12;

struct Block {
  std::size_t begin;
  std::size_t end;  // one past last
  bool pinned_lower;
  bool pinned_upper;
};

// Walks the blocks induced by the working set: coordinates j-1 and j share a
// block iff difference constraint j is in the set.
template <class F>
void for_each_block(const std::vector<char>& in_set, std::size_t m, F&& visit) {
  std::size_t s = 0;
  while (s < m) {
    std::size_t e = s + 1;
    while (e < m && in_set[e]) {
      ++e;
    }
    visit(Block{s, e, s == 0 && in_set[0] != 0, e == m && in_set[m] != 0});
    s = e;
  }
}

// Equality-constrained minimizer for the working set plus its multipliers.
// With flux f_k standing for the multiplier of constraint k (zero when
// inactive), stationarity reads q_k - a_k = f_k - f_{k+1}, so the multipliers
// inside a block are prefix sums of (a_k - v).
void solve_working_set(std::span<const double> a, const SupportBounds& bounds,
                       const std::vector<char>& in_set, std::vector<double>& q,
                       std::vector<double>& mu) {
  const std::size_t m = a.size();
  std::fill(mu.begin(), mu.end(), 0.0);
  for_each_block(in_set, m, [&](const Block& b) {
    if (b.pinned_lower && b.pinned_upper) {
      throw InternalError("working set pins one block to both support bounds");
    }
    double sum = 0.0;
    for (std::size_t k = b.begin; k < b.end; ++k) {
      sum += a[k];
    }
    const double len = static_cast<double>(b.end - b.begin);
    const double v = b.pinned_lower ? bounds.lower : b.pinned_upper ? bounds.upper : sum / len;

    double flux = b.pinned_lower ? len * v - sum : 0.0;
    if (b.pinned_lower) {
      mu[0] = flux;
    }
    for (std::size_t k = b.begin; k < b.end; ++k) {
      q[k] = v;
      flux += a[k] - v;
      if (k + 1 < b.end) {
        mu[k + 1] = flux;
      }
    }
    if (b.pinned_upper) {
      mu[m] = flux;
    }
  });
}

std::vector<char> sanitize_warm(const ActiveSet* warm, const ConstraintSystem& cs) {
  const std::size_t m = cs.dimension();
  std::vector<char> in_set(m + 1, 0);
  if (warm == nullptr) {
    return in_set;
  }
  for (std::size_t c : warm->indices()) {
    if (c <= m && cs.present(c)) {
      in_set[c] = 1;
    }
  }
  if (in_set[0] && in_set[m]) {
    bool single_block = true;
    for (std::size_t j = 1; j < m; ++j) {
      single_block = single_block && in_set[j];
    }
    if (single_block) {
      in_set[m] = 0;
    }
  }
  return in_set;
}

ProjectionResult project_scalar(double a, const SupportBounds& bounds,
                                const std::vector<char>& warm_set) {
  ProjectionResult res;
  res.q = Vector::Constant(1, a);
  std::vector<char> final_set(2, 0);
  if (a < bounds.lower) {
    res.q[0] = bounds.lower;
    res.active = ActiveSet({0});
    res.dual = {bounds.lower - a};
    final_set[0] = 1;
  } else if (a > bounds.upper) {
    res.q[0] = bounds.upper;
    res.active = ActiveSet({1});
    res.dual = {a - bounds.upper};
    final_set[1] = 1;
  }
  res.iterations = static_cast<std::size_t>((warm_set[0] != final_set[0]) +
                                            (warm_set[1] != final_set[1]));
  return res;
}

}  // namespace

ConstraintSystem::ConstraintSystem(std::size_t m, SupportBounds bounds) : m_(m), bounds_(bounds) {
  if (m == 0) {
    throw InvalidArgument("constraint system dimension must be positive");
  }
}

bool ConstraintSystem::present(std::size_t c) const noexcept {
  if (c == 0) {
    return bounds_.has_lower();
  }
  if (c == m_) {
    return bounds_.has_upper();
  }
  return c < m_;
}

double ConstraintSystem::slack(std::size_t c, std::span<const double> q) const {
  if (c == 0) {
    return q[0] - bounds_.lower;
  }
  if (c == m_) {
    return bounds_.upper - q[m_ - 1];
  }
  return q[c] - q[c - 1];
}

ActiveSet::ActiveSet(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

bool ActiveSet::contains(std::size_t c) const noexcept {
  return std::binary_search(indices_.begin(), indices_.end(), c);
}

std::string ActiveSet::to_json() const { return nlohmann::json(indices_).dump(); }

ActiveSet ActiveSet::from_json(const std::string& text) {
  try {
    const auto parsed = nlohmann::json::parse(text);
    return ActiveSet(parsed.get<std::vector<std::size_t>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("active set JSON: ") + e.what());
  }
}

ProjectionResult project_monotone(std::span<const double> a, SupportBounds bounds,
                                  const ActiveSet* warm) {
  const std::size_t m = a.size();
  if (m == 0) {
    throw InvalidArgument("project_monotone: empty input");
  }
  for (double v : a) {
    if (!std::isfinite(v)) {
      throw InvalidArgument("project_monotone: non-finite input");
    }
  }

  const ConstraintSystem cs(m, bounds);
  std::vector<char> in_set = sanitize_warm(warm, cs);
  if (m == 1) {
    return project_scalar(a[0], bounds, in_set);
  }

  std::vector<double> q(m);
  std::vector<double> mu(m + 1);
  std::vector<double> mu_feasible(m + 1, 0.0);
  const std::size_t max_changes = 10 * (m + 1);
  std::size_t changes = 0;

  auto count_change = [&] {
    if (++changes > max_changes) {
      throw InternalError("project_monotone: working-set iteration cap exceeded (cycling)");
    }
  };

  for (;;) {
    solve_working_set(a, bounds, in_set, q, mu);

    // Dual step: move from the last dual-feasible multipliers toward mu and
    // drop the first constraint whose multiplier reaches zero.
    std::size_t blocking = m + 1;
    double step = 1.0;
    for (std::size_t c = 0; c <= m; ++c) {
      if (in_set[c] && mu[c] < -kTol) {
        const double prev = std::max(mu_feasible[c], 0.0);
        const double t = prev / (prev - mu[c]);
        if (t < step || blocking == m + 1) {
          step = t;
          blocking = c;
        }
      }
    }
    if (blocking <= m) {
      for (std::size_t c = 0; c <= m; ++c) {
        if (in_set[c]) {
          mu_feasible[c] = std::max(0.0, mu_feasible[c] + step * (mu[c] - mu_feasible[c]));
        }
      }
      in_set[blocking] = 0;
      mu_feasible[blocking] = 0.0;
      count_change();
      continue;
    }
    mu_feasible = mu;

    // Primal step: add the most violated constraint, smallest index on ties.
    std::size_t worst = m + 1;
    double worst_slack = -kTol;
    for (std::size_t c = 0; c <= m; ++c) {
      if (in_set[c] || !cs.present(c)) {
        continue;
      }
      const double s = cs.slack(c, q);
      if (s < worst_slack) {
        worst_slack = s;
        worst = c;
      }
    }
    if (worst > m) {
      break;
    }
    in_set[worst] = 1;
    count_change();
  }

  // Remaining violations are below kTol; remove them so the output is
  // feasible without tolerance.
  q[0] = std::max(q[0], bounds.lower);
  for (std::size_t k = 1; k < m; ++k) {
    q[k] = std::max(q[k], q[k - 1]);
  }
  for (std::size_t k = 0; k < m; ++k) {
    q[k] = std::min(q[k], bounds.upper);
  }

  ProjectionResult res;
  res.q = Eigen::Map<const Vector>(q.data(), static_cast<Eigen::Index>(m));
  std::vector<std::size_t> active;
  for (std::size_t c = 0; c <= m; ++c) {
    if (in_set[c]) {
      active.push_back(c);
      res.dual.push_back(mu[c]);
    }
  }
  res.active = ActiveSet(std::move(active));
  res.iterations = changes;
  return res;
}

Vector pava_clip_oracle(std::span<const double> a, SupportBounds bounds) {
  const std::size_t m = a.size();
  for (double v : a) {
    if (!std::isfinite(v)) {
      throw InvalidArgument("pava_clip_oracle: non-finite input");
    }
  }
  // Stack of pooled blocks (sum, count); merge while the last two decrease.
  std::vector<double> sums;
  std::vector<std::size_t> counts;
  for (std::size_t k = 0; k < m; ++k) {
    sums.push_back(a[k]);
    counts.push_back(1);
    while (sums.size() > 1) {
      const std::size_t t = sums.size() - 1;
      const double mean_last = sums[t] / static_cast<double>(counts[t]);
      const double mean_prev = sums[t - 1] / static_cast<double>(counts[t - 1]);
      if (mean_prev <= mean_last) {
        break;
      }
      sums[t - 1] += sums[t];
      counts[t - 1] += counts[t];
      sums.pop_back();
      counts.pop_back();
    }
  }
  Vector out(static_cast<Eigen::Index>(m));
  Eigen::Index k = 0;
  for (std::size_t b = 0; b < sums.size(); ++b) {
    const double v = std::clamp(sums[b] / static_cast<double>(counts[b]), bounds.lower, bounds.upper);
    for (std::size_t r = 0; r < counts[b]; ++r) {
      out[k++] = v;
    }
  }
  return out;
}

void apply_projection_jacobian(const ActiveSet& active, SupportBounds bounds,
                               std::span<double> v) {
  const std::size_t m = v.size();
  if (m == 0) {
    return;
  }
  const ConstraintSystem cs(m, bounds);
  std::vector<char> in_set(m + 1, 0);
  for (std::size_t c : active.indices()) {
    if (c <= m && cs.present(c)) {
      in_set[c] = 1;
    }
  }
  for_each_block(in_set, m, [&](const Block& b) {
    if (b.pinned_lower || b.pinned_upper) {
      std::fill(v.begin() + static_cast<std::ptrdiff_t>(b.begin),
                v.begin() + static_cast<std::ptrdiff_t>(b.end), 0.0);
      return;
    }
    double sum = 0.0;
    for (std::size_t k = b.begin; k < b.end; ++k) {
      sum += v[k];
    }
    const double mean = sum / static_cast<double>(b.end - b.begin);
    std::fill(v.begin() + static_cast<std::ptrdiff_t>(b.begin),
              v.begin() + static_cast<std::ptrdiff_t>(b.end), mean);
  });
}

}  // namespace fastfrechet
