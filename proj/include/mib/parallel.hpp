#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mib {

/// Caps the worker count for all parallel kernels. 0 restores the OpenMP
/// default. Results never depend on this value: every kernel assigns each
/// index its own output slot and reduces in a fixed order.
void set_max_threads(int n);
int effective_threads();

/// Runs fn(i) for i in [0,n). Iterations must be independent; any shared
/// reduction has to happen after the loop, in index order.
template <typename Fn>
void par_for(std::size_t n, Fn&& fn) {
#ifdef _OPENMP
  const int nt = effective_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    fn(static_cast<std::size_t>(i));
  }
#else
  for (std::size_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace mib
