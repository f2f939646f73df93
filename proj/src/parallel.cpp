#include "corrint/parallel.hpp"

#include <atomic>
#include <cstdlib>

namespace corrint {

namespace {
std::atomic<int> g_threads{0};
}

int default_threads() {
  if (int n = g_threads.load(); n > 0) return n;
  if (const char* env = std::getenv("CORRINT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void set_default_threads(int n) { g_threads.store(n > 0 ? n : 0); }

}  // namespace corrint
