#include "geovad/parallel.hpp"

#include <atomic>
#include <mutex>
#include <thread>
#include <vector>

namespace geovad::parallel {

namespace {
int g_threads = 1;
}

void set_threads(int n) { g_threads = n < 1 ? 1 : n; }
int threads() { return g_threads; }

void for_chunks(Index n, Index chunk, const std::function<void(Index, Index)>& fn) {
  if (n <= 0) return;
  if (chunk < 1) chunk = 1;
  const Index n_chunks = (n + chunk - 1) / chunk;
  const int workers = static_cast<int>(std::min<Index>(g_threads, n_chunks));
  if (workers <= 1) {
    for (Index c = 0; c < n_chunks; ++c) fn(c * chunk, std::min(n, (c + 1) * chunk));
    return;
  }
  std::atomic<Index> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const Index c = next.fetch_add(1);
      if (c >= n_chunks || failed.load()) break;
      try {
        fn(c * chunk, std::min(n, (c + 1) * chunk));
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void for_each_index(Index n, const std::function<void(Index)>& fn) {
  for_chunks(n, 16, [&](Index b, Index e) {
    for (Index i = b; i < e; ++i) fn(i);
  });
}

}  // namespace geovad::parallel
