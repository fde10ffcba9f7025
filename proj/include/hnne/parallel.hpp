#pragma once

#include <cstdint>
#include <functional>

namespace hnne {

// Effective worker count: set_thread_count() if called with > 0, else the
// HNNE_THREADS environment variable, else hardware concurrency.
int thread_count();
void set_thread_count(int n);  // 0 restores the automatic default

// Runs fn(begin, end) over [0, n) split into fixed-size chunks handed to a
// worker pool. The chunk boundaries depend only on n and chunk, never on the
// worker count, so any function that writes results disjointly per index is
// bitwise reproducible for every thread count. fn must not touch shared
// mutable state. Exceptions propagate (first one wins).
void parallel_chunks(std::int64_t n, std::int64_t chunk,
                     const std::function<void(std::int64_t, std::int64_t)>& fn);

// Convenience wrapper: fn(i) per index.
void parallel_for(std::int64_t n, std::int64_t chunk, const std::function<void(std::int64_t)>& fn);

}  // namespace hnne
