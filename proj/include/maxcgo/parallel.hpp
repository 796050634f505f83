#pragma once

#include <cstddef>
#include <functional>

namespace maxcgo {

// Worker count used when a call passes threads <= 0 (starts at 1).
void set_default_threads(int threads);
int default_threads();

// Runs fn(i) for i in [0, n) on a small pool. Each index runs exactly once;
// the exception of the lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads = 0);

}  // namespace maxcgo
