#pragma once

#include <cstddef>
#include <functional>

namespace bbrt {

/// Splits [0, n) into contiguous chunks and runs fn(begin, end) on up to
/// `threads` workers. Falls back to a direct call when threads <= 1 or the
/// range is tiny. Blocks until all workers finish; exceptions from workers
/// are rethrown on the caller thread.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

int default_thread_count();

}  // namespace bbrt
