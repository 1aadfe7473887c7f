#pragma once

#include <cstddef>
#include <functional>

namespace hyperfit {

/// Calls `body(i)` for every i in [0, count) on up to `threads` workers.
///
/// Indices are handed out dynamically; callers that write result i into slot i
/// get output independent of the thread count and schedule. threads <= 0 means
/// std::thread::hardware_concurrency(). The first exception thrown by a body is
/// rethrown on the calling thread after all workers joined.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

/// Resolves a requested thread count (<= 0 means hardware concurrency).
int resolve_threads(int threads);

}  // namespace hyperfit
