#pragma once

#include <cstddef>
#include <functional>

namespace lowmem {

/// Worker count: LOWMEM_SDP_THREADS if set (>= 1), else hardware concurrency.
std::size_t thread_limit();

/// Calls body(i) for i in [0, count), split into contiguous chunks across at
/// most thread_limit() threads. Results must not depend on the split.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace lowmem
