#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace agelab {

/// Every Monte Carlo kernel has a serial reference path and an OpenMP path.
/// Both consume identical per-task RNG streams and reduce in task order, so
/// they produce bit-identical results.
enum class Execution { serial, parallel };

inline void set_workers(int n)
{
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

inline int workers()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs f(i) for i in [0, n). The exception of the lowest failing task index
/// is rethrown after all tasks finish.
template <class F>
void for_each_task(std::size_t n, Execution ex, F&& f)
{
    if (ex == Execution::serial) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::exception_ptr first;
    std::size_t first_index = std::numeric_limits<std::size_t>::max();
    std::mutex m;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(m);
            if (static_cast<std::size_t>(i) < first_index) {
                first_index = static_cast<std::size_t>(i);
                first = std::current_exception();
            }
        }
    }
    if (first) std::rethrow_exception(first);
}

}  // namespace agelab
