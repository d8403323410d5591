#pragma once

#include <cstddef>
#include <functional>

namespace alab {

// Number of worker threads used by parallel_for; 1 by default. Results of every
// caller are assembled by index, so they never depend on this setting.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n). Exceptions thrown by body are rethrown (the one
// with the smallest index wins) after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace alab
