#pragma once

#include <cstddef>
#include <functional>

namespace flexgs {

// Number of worker threads used by parallel_chunks. Defaults to the
// hardware concurrency; set_worker_count(n <= 0) restores that default.
int worker_count();
void set_worker_count(int n);

// Runs fn(begin, end) over contiguous chunks of [0, n). Chunk boundaries
// depend only on (n, worker_count), never on scheduling, so any code that
// keeps per-chunk state deterministic stays deterministic under threading.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace flexgs
