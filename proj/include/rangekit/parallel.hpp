#pragma once

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rangekit {

// Thread cap for all parallel kernels. RANGEKIT_THREADS, when set to a
// positive integer, bounds the number of OpenMP threads; otherwise the
// OpenMP default applies. Read once per process.
inline int thread_cap() {
#ifdef _OPENMP
  static const int cap = [] {
    int n = omp_get_max_threads();
    if (const char* s = std::getenv("RANGEKIT_THREADS")) {
      int v = std::atoi(s);
      if (v >= 1 && v < n) n = v;
    }
    return n;
  }();
  return cap;
#else
  return 1;
#endif
}

inline bool in_parallel_region() {
#ifdef _OPENMP
  return omp_in_parallel() != 0;
#else
  return false;
#endif
}

}  // namespace rangekit
