#pragma once

#include <cstdint>
#include <functional>

namespace ivxboot {

// Worker count: IVXBOOT_THREADS if set, else hardware concurrency.
int default_thread_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous static blocks so
// the result of each index never depends on scheduling; fn must write only to
// per-index slots. Exceptions are captured and rethrown on the caller thread.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn);

}  // namespace ivxboot
