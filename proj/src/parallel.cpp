#include "roughsde/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#ifdef ROUGH_SDE_HAVE_OPENMP
#include <omp.h>
#endif

namespace roughsde {

int thread_count() {
#ifdef ROUGH_SDE_HAVE_OPENMP
    int hw = omp_get_max_threads();
#else
    int hw = 1;
#endif
    if (const char* env = std::getenv("ROUGH_SDE_THREADS")) {
        int requested = std::atoi(env);
        if (requested >= 1) {
            int cap = std::max(1u, std::thread::hardware_concurrency());
            return std::min(requested, cap);
        }
    }
    return hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
#ifdef ROUGH_SDE_HAVE_OPENMP
    int threads = thread_count();
    if (threads > 1 && count > 1) {
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
        for (long long i = 0; i < static_cast<long long>(count); ++i) {
            fn(static_cast<std::size_t>(i));
        }
        return;
    }
#endif
    for (std::size_t i = 0; i < count; ++i) fn(i);
}

}  // namespace roughsde
