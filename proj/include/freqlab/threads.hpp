#pragma once

#include <cstddef>
#include <functional>

namespace freqlab {

// Worker count for parallel evaluation fan-out. Defaults to the hardware
// concurrency; FREQLAB_THREADS overrides it. 1 disables threading.
int thread_count();
void set_thread_count(int n);

// Runs fn(begin, end) over a static chunking of [0, n). Chunk boundaries
// depend only on n and the worker count, and callers must gather results by
// index, so parallel runs reproduce the sequential ones bit for bit.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace freqlab
