#pragma once

#include <cstdint>
#include <functional>

namespace dagscore {

// 0 or negative -> hardware concurrency, clamped to at least 1.
int resolve_threads(int requested);

// Runs fn(i) for i in [0, count) on a worker pool. Tasks are claimed through a
// shared counter, so completion order is nondeterministic; callers must write
// results into per-index slots. The first worker exception is rethrown after
// all workers join.
void parallel_for_index(std::int64_t count, int threads, const std::function<void(std::int64_t)>& fn);

}  // namespace dagscore
