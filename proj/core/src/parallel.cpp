#include "ppl/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace ppl {

namespace {
std::atomic<unsigned> g_threads{0};

unsigned from_env() {
  if (const char* s = std::getenv("PPL_THREADS")) {
    try {
      long v = std::stol(s);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return 1;
}
}  // namespace

void set_thread_count(unsigned n) { g_threads = n; }

unsigned thread_count() {
  unsigned n = g_threads.load();
  return n == 0 ? from_env() : n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t, unsigned)>& body) {
  unsigned workers = thread_count();
  if (workers <= 1 || n < 2048) {
    body(0, n, 0);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errs(workers);
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t b = w * chunk, e = std::min(n, b + chunk);
    pool.emplace_back([&, b, e, w] {
      try {
        if (b < e) body(b, e, w);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace ppl
