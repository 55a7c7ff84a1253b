#pragma once

#include <cstddef>
#include <functional>

namespace nd {

/// Process-wide worker count used by parallel scans. Results never depend on it.
void set_thread_count(std::size_t count);
std::size_t thread_count();

/// Calls body(i) for i in [0, count). Iterations are split into contiguous
/// blocks, one per worker; each body call must only write its own outputs.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace nd
