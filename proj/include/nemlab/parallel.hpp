#pragma once

#include <cstddef>
#include <functional>

namespace nemlab {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once, so writes into a preallocated slot per index keep the
/// output ordering independent of the thread count. The first exception thrown
/// by any body is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace nemlab
