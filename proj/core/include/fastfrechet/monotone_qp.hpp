#pragma once

#include "fastfrechet/core.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fastfrechet {

/// Constraint indexing for the box-constrained monotone cone in R^m:
///
///   0        q[0] >= lower            (present iff lower is finite)
///   j        q[j] - q[j-1] >= 0       for j = 1..m-1
///   m        -q[m-1] >= -upper        (present iff upper is finite)
///
/// The indexing is part of the serialized warm-start format; do not reorder.
class ConstraintSystem {
public:
  ConstraintSystem(std::size_t m, SupportBounds bounds);

  std::size_t dimension() const noexcept { return m_; }
  const SupportBounds& bounds() const noexcept { return bounds_; }

  std::size_t lower_index() const noexcept { return 0; }
  std::size_t upper_index() const noexcept { return m_; }
  bool is_difference(std::size_t c) const noexcept { return c >= 1 && c < m_; }

  /// Whether index c names a constraint that exists for these bounds.
  bool present(std::size_t c) const noexcept;

  /// Slack of constraint c at q (negative = violated).
  double slack(std::size_t c, std::span<const double> q) const;

private:
  std::size_t m_;
  SupportBounds bounds_;
};

/// Working set of constraints treated as equalities; sorted, unique.
class ActiveSet {
public:
  ActiveSet() = default;
  /// Sorts and deduplicates.
  explicit ActiveSet(std::vector<std::size_t> indices);

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(std::size_t c) const noexcept;

  /// JSON array of integers, e.g. "[0,3,4]".
  std::string to_json() const;
  static ActiveSet from_json(const std::string& text);

  friend bool operator==(const ActiveSet&, const ActiveSet&) = default;

private:
  std::vector<std::size_t> indices_;
};

struct ProjectionResult {
  Vector q;
  ActiveSet active;
  /// Working-set additions plus removals performed by the solver.
  std::size_t iterations = 0;
  /// Multipliers for active.indices(), in the same order.
  std::vector<double> dual;
};

/// Euclidean projection of `a` onto { lower <= q[0] <= ... <= q[m-1] <= upper }
/// by a dual active-set iteration specialized to chain constraints.
///
/// Each working set splits the coordinates into blocks joined by active
/// difference constraints; the equality-constrained minimizer sets a free
/// block to the mean of `a` over it and a bound-pinned block to the bound.
/// Multipliers follow from prefix sums, so every subproblem is O(m).
///
/// `warm` may be any set of indices, including infeasible or stale ones;
/// indices that do not exist for `bounds` are dropped, and a set that pins one
/// block to both bounds loses its upper constraint. The solution does not
/// depend on `warm`, only the iteration count does.
///
/// Throws InvalidArgument for non-finite input and InternalError if the
/// iteration count exceeds 10 * (m + 1).
ProjectionResult project_monotone(std::span<const double> a, SupportBounds bounds,
                                  const ActiveSet* warm = nullptr);

inline ProjectionResult project_monotone(const Vector& a, SupportBounds bounds,
                                         const ActiveSet* warm = nullptr) {
  return project_monotone(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                          bounds, warm);
}

/// Pool-adjacent-violators isotonic regression followed by coordinatewise
/// clipping to [lower, upper]. Independent reference for project_monotone.
Vector pava_clip_oracle(std::span<const double> a, SupportBounds bounds);

inline Vector pava_clip_oracle(const Vector& a, SupportBounds bounds) {
  return pava_clip_oracle(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                          bounds);
}

/// Applies the Jacobian of the projection at a fixed active set to `v`, in place:
/// free blocks are replaced by their mean, bound-pinned blocks are zeroed.
/// The Jacobian is symmetric, so this also applies its transpose.
void apply_projection_jacobian(const ActiveSet& active, SupportBounds bounds,
                               std::span<double> v);

}  // namespace fastfrechet
