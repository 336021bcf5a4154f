#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace movemes {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

/// Deterministic parallel sum: the index range is cut into fixed-size blocks,
/// block partials are accumulated independently and then combined in block
/// order. The result is bit-identical for any thread count (including 1),
/// though not bit-identical to a plain left-to-right loop.
template <typename Term>
double blocked_sum(std::ptrdiff_t n, Term&& term, std::ptrdiff_t block = 1024) {
  if (n <= 0) return 0.0;
  const std::ptrdiff_t nblocks = (n + block - 1) / block;
  std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
    const std::ptrdiff_t lo = b * block;
    const std::ptrdiff_t hi = std::min(n, lo + block);
    double acc = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) acc += term(i);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

/// Serial reference for blocked_sum: a plain accumulation loop.
template <typename Term>
double serial_sum(std::ptrdiff_t n, Term&& term) {
  double total = 0.0;
  for (std::ptrdiff_t i = 0; i < n; ++i) total += term(i);
  return total;
}

/// Parallel loop over [0, n). Body must be free of cross-iteration
/// dependencies; results are then independent of the thread count.
template <typename Body>
void parallel_for(std::ptrdiff_t n, Body&& body) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

}  // namespace movemes
