#pragma once

#include <cstddef>
#include <functional>

namespace fastfrechet {

/// Number of workers to use when the caller passes 0.
std::size_t default_thread_count() noexcept;

/// Runs body(i) for i in [0, count) on up to `threads` workers
/// (0 = default_thread_count()). Indices are claimed dynamically, so body
/// must write only to slot i of pre-sized outputs; callers reduce afterwards
/// in index order. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace fastfrechet
