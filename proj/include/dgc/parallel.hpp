#pragma once

#include <cstddef>
#include <functional>

namespace dgc {

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Indices are handed out in order; the first exception thrown
/// by any body is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace dgc
