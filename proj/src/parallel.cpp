#include "gaussocc/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>

namespace gaussocc {

namespace {
std::atomic<int> g_requested{0};

int env_cap() {
  const char* env = std::getenv("GAUSSOCC_THREADS");
  if (!env) return 0;
  const int v = std::atoi(env);
  return v > 0 ? v : 0;
}
}  // namespace

int thread_count() {
  int n = g_requested.load();
  if (n <= 0) n = omp_get_max_threads();
  if (const int cap = env_cap(); cap > 0) n = std::min(n, cap);
  return std::max(n, 1);
}

void set_threads(int n) { g_requested.store(std::max(n, 0)); }

}  // namespace gaussocc
