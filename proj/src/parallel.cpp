#include "nlqc/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

extern "C" void openblas_set_num_threads(int);

namespace nlqc {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NLQC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void set_global_threads(int threads) {
  openblas_set_num_threads(threads > 0 ? threads : resolve_threads(0));
}

void parallel_for(long long n, const std::function<void(long long)>& fn, int threads) {
  const int t = std::min<long long>(resolve_threads(threads), n);
  if (t <= 1) {
    for (long long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const long long i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace nlqc
