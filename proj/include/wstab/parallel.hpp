#pragma once

#include <cstddef>
#include <functional>

namespace wstab {

// Worker cap: WSTAB_THREADS if set and positive, else hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
// write into index-owned slots and reduce afterwards in index order, so
// results do not depend on the number of workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace wstab
