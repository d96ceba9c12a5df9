#include "mib/parallel.hpp"

#include <atomic>

namespace mib {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int effective_threads() {
#ifdef _OPENMP
  int limit = g_max_threads.load();
  int base = omp_get_max_threads();
  if (limit > 0 && limit < base) return limit;
  return base;
#else
  return 1;
#endif
}

}  // namespace mib
