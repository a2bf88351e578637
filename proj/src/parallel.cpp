#include "crowdctl/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace crowdctl {

unsigned thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("CROWDCTL_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  try {
    const long requested = std::stol(env);
    if (requested <= 0) return hw;
    return static_cast<unsigned>(requested);
  } catch (const std::exception&) {
    return hw;
  }
}

void parallel_for(Index n, const std::function<void(Index)>& fn) {
  const unsigned workers = static_cast<unsigned>(
      std::min<Index>(static_cast<Index>(thread_count()), n));
  if (workers <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (Index i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace crowdctl
