#pragma once

#include <cstdint>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

// Threading policy: every parallel loop ranges over independent work items
// and each output element is written by exactly one task, so results are
// bit-identical for any thread count. threads()==1 is the serial reference
// path used by the determinism tests; the benchmark compares both.

namespace qhc::par {

inline int& thread_count() {
    static int n = 1;
    return n;
}

inline void set_threads(int n) { thread_count() = n < 1 ? 1 : n; }
inline int threads() { return thread_count(); }

template <typename F>
inline void parallel_for(std::int64_t n, F&& body) {
#ifdef _OPENMP
    if (thread_count() > 1) {
        #pragma omp parallel for schedule(dynamic) num_threads(thread_count())
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
#endif
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

} // namespace qhc::par
