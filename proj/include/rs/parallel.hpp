#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rs {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline int thread_index() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

// Runs fn(i) for i in [0, n). The parallel path splits the range across OpenMP
// threads; callers must write results to disjoint per-index slots so both
// paths produce identical output.
template <typename Fn>
void for_each_index(std::size_t n, bool parallel, Fn&& fn) {
#ifdef _OPENMP
  if (parallel && n > 1) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      fn(static_cast<std::size_t>(i));
    }
    return;
  }
#endif
  (void)parallel;
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace rs
