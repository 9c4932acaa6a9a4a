#pragma once

#include <cstddef>
#include <functional>

namespace broadkin {

/// Hardware concurrency, capped by BROADKIN_THREADS when that is set and positive.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) over contiguous static blocks. Each index is
/// handled by exactly one worker, so per-index results are independent of
/// the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Same with an explicit worker count.
void parallel_for(std::size_t n, std::size_t max_workers, const std::function<void(std::size_t)>& body);

} // namespace broadkin
