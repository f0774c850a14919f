#include "mwlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mwlab {

int thread_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("MWLAB_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) hw = std::min(hw, cap);
    } catch (...) {
    }
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, std::size_t min_chunk) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), (n + min_chunk - 1) / std::max<std::size_t>(min_chunk, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::size_t err_index = n;
  std::mutex err_mu;
  const std::size_t chunk = std::max<std::size_t>(min_chunk, n / (workers * 8) + 1);
  auto body = [&] {
    for (;;) {
      const std::size_t start = next.fetch_add(chunk);
      if (start >= n) return;
      const std::size_t stop = std::min(n, start + chunk);
      for (std::size_t i = start; i < stop; ++i) {
        try {
          fn(i);
        } catch (...) {
          // keep the failure with the smallest index so errors are reproducible
          std::lock_guard<std::mutex> lk(err_mu);
          if (i < err_index) {
            err_index = i;
            err = std::current_exception();
          }
          break;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace mwlab
