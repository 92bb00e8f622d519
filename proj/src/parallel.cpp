#include "pwl/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace pwl {

int worker_count() {
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("PWL_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) workers = std::min<long>(workers, cap);
  }
  return workers;
}

void parallel_for(int begin, int end, const std::function<void(int, int)>& fn, int min_chunk) {
  const int total = end - begin;
  if (total <= 0) return;
  const int workers = std::min(worker_count(), std::max(1, total / std::max(1, min_chunk)));
  if (workers <= 1) {
    fn(begin, end);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int lo = begin + static_cast<int>(static_cast<long long>(total) * w / workers);
    const int hi = begin + static_cast<int>(static_cast<long long>(total) * (w + 1) / workers);
    threads.emplace_back([&, w, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace pwl
