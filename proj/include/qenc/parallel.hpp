#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qenc::par {

// Number of threads actually used when `requested` workers are asked for.
// 0 means "use all available".
inline int resolve_workers(int requested) {
#ifdef _OPENMP
    if (requested <= 0) return omp_get_max_threads();
    return requested;
#else
    (void)requested;
    return 1;
#endif
}

// Index-parallel loop over [0, n). Each index must write only to its own
// slots so that results are identical for any worker count. workers == 1
// takes the plain serial path (no OpenMP region at all); this is the
// reference implementation the tests compare against.
template <class Fn>
void for_each_index(std::size_t n, int workers, Fn&& fn) {
    const int nw = resolve_workers(workers);
    if (nw == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nw)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        fn(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace qenc::par
