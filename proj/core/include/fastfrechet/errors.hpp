#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fastfrechet {

/// Bad argument supplied by the caller (shape mismatch, out-of-range parameter).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Input data that violates a domain invariant. Carries every offending
/// (row, column) position so callers can report all of them at once.
class ValidationError : public std::invalid_argument {
public:
  using Position = std::pair<std::size_t, std::size_t>;

  ValidationError(const std::string& what, std::vector<Position> positions)
      : std::invalid_argument(what), positions_(std::move(positions)) {}

  const std::vector<Position>& positions() const noexcept { return positions_; }

private:
  std::vector<Position> positions_;
};

/// Sample covariance is singular or too ill-conditioned to invert.
class SingularDesign : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Solver invariant broken (e.g. the working-set iteration cap was hit).
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Malformed file content (CSV/JSON), reported with a line number when known.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace fastfrechet
