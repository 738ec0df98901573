#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

#include <utility>

namespace ptqrm::sweep {

inline int max_jobs() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Serial reference path. Kept side by side with the parallel kernel so tests
// can compare outputs and the benchmark can measure the speedup.
template <class F>
void serial_for(int n, F&& body) {
  for (int i = 0; i < n; ++i) body(i);
}

// OpenMP kernel over independent grid points. Results must be written into
// preallocated slots keyed by index, which keeps output identical for any
// thread count. jobs = 0 means the OpenMP default.
template <class F>
void parallel_for(int n, int jobs, F&& body) {
#ifdef _OPENMP
  if (jobs != 1) {
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
#endif
  serial_for(n, std::forward<F>(body));
}

}  // namespace ptqrm::sweep
