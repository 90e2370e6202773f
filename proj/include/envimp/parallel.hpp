#pragma once

#include <cstddef>
#include <functional>

namespace envimp {

/// Worker count: `requested` if positive, else $ENVIMP_THREADS if set to a
/// positive integer, else std::thread::hardware_concurrency() (at least 1).
unsigned resolve_threads(unsigned requested = 0);

/// Runs body(k) for k in [0, n) on up to `threads` workers. Indices are
/// handed out in contiguous blocks; the first exception thrown is rethrown
/// after all workers join.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace envimp
