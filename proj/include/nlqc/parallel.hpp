#pragma once

#include <functional>

namespace nlqc {

// Number of worker threads: explicit request > NLQC_THREADS env > hardware.
int resolve_threads(int requested = 0);

// Apply fn(i) for i in [0, n) across threads. Writes must go to
// caller-owned per-index slots so results are order-independent.
void parallel_for(long long n, const std::function<void(long long)>& fn, int threads = 0);

// Also caps OpenBLAS threads so dense kernels honor the same budget.
void set_global_threads(int threads);

}  // namespace nlqc
