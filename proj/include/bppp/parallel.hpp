// parallel.hpp
// Execution-mode switch for the data-parallel kernels.
//
// Production kernels reduce over fixed-size chunks and then accumulate the
// per-chunk partials in chunk order, so results are bitwise identical for any
// thread count (and for Serial vs Parallel). The naive *_reference kernels in
// kernels.hpp are the serial references used by tests and the benchmark.

#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bppp {

enum class ExecMode { Serial, Parallel };

// Fixed chunk length of the ordered reductions. Changing it changes the
// floating-point association, so it is a constant, not a tuning knob.
inline constexpr int kReduceChunk = 64;

inline int num_chunks(int n) { return n <= 0 ? 0 : (n + kReduceChunk - 1) / kReduceChunk; }

inline bool parallel_enabled(ExecMode mode) {
#ifdef _OPENMP
    return mode == ExecMode::Parallel;
#else
    (void)mode;
    return false;
#endif
}

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_thread_count(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

}  // namespace bppp
