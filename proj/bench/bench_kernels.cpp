// Times the threaded kernels against their serial reference transcriptions.
// Usage: bench_kernels [n] [repeats]; set ROUGH_SDE_THREADS to pin workers.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "roughsde/fbm.hpp"
#include "roughsde/frac_calc.hpp"
#include "roughsde/parallel.hpp"
#include "roughsde/reference.hpp"

using namespace roughsde;

namespace {

template <typename F>
double time_best(F&& fn, int repeats) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::stoul(argv[1]) : 4096;
    const int repeats = argc > 2 ? std::stoi(argv[2]) : 3;
    const Grid grid(1.0, n);
    const GridPath path = sample_fbm(0.75, grid, 42);
    const FractionalOrder order(0.3);

    std::printf("n=%zu threads=%d repeats=%d (best-of timings, seconds)\n", n, thread_count(),
                repeats);

    double sink = 0.0;
    const double t_rl = time_best([&] { sink += rl_integral(path, order, Side::left).values[n]; },
                                  repeats);
    const double t_rl_ref =
        time_best([&] { sink += ref::rl_integral(path, order, Side::left).values[n]; }, repeats);
    std::printf("%-24s %10.4f  serial %10.4f  speedup %.2fx\n", "rl_integral", t_rl, t_rl_ref,
                t_rl_ref / t_rl);

    const double t_wm =
        time_best([&] { sink += wm_derivative(path, order, Side::left).values[n]; }, repeats);
    const double t_wm_ref =
        time_best([&] { sink += ref::wm_derivative(path, order, Side::left).values[n]; },
                  repeats);
    std::printf("%-24s %10.4f  serial %10.4f  speedup %.2fx\n", "wm_derivative", t_wm, t_wm_ref,
                t_wm_ref / t_wm);

    const double t_gg =
        time_best([&] { sink += gagliardo_seminorm(path, order, 1.0).value; }, repeats);
    const double t_gg_ref =
        time_best([&] { sink += ref::gagliardo_seminorm(path, order, 1.0); }, repeats);
    std::printf("%-24s %10.4f  serial %10.4f  speedup %.2fx\n", "gagliardo_seminorm", t_gg,
                t_gg_ref, t_gg_ref / t_gg);

    std::printf("(checksum %.6g)\n", sink);
    return 0;
}
