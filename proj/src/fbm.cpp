#include "roughsde/fbm.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "roughsde/errors.hpp"
#include "roughsde/rng.hpp"

namespace roughsde {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void forward_fft(std::vector<std::complex<double>>& buf) {
    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(buf.size()), data, data, FFTW_FORWARD,
                                FFTW_ESTIMATE);
    }
    if (!plan) throw InternalError("fftw plan creation failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
}

}  // namespace

GridPath sample_fbm(double H, const Grid& grid, std::uint64_t seed) {
    if (!(H > 0.0) || !(H < 1.0)) {
        throw std::invalid_argument("Hurst index must lie in (0,1)");
    }
    const std::size_t n = grid.n;
    const std::size_t M = 2 * n;
    const double two_h = 2.0 * H;

    // fGn autocovariance at unit mesh; the mesh enters as dt^H at the end.
    std::vector<double> acov(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        double kd = static_cast<double>(k);
        double km1 = std::abs(kd - 1.0);
        acov[k] = 0.5 * (std::pow(kd + 1.0, two_h) - 2.0 * std::pow(kd, two_h) +
                         std::pow(km1, two_h));
    }

    // First row of the circulant embedding and its eigenvalues.
    std::vector<std::complex<double>> buf(M);
    for (std::size_t k = 0; k <= n; ++k) buf[k] = acov[k];
    for (std::size_t j = 1; j < n; ++j) buf[n + j] = acov[n - j];
    forward_fft(buf);

    std::vector<double> lambda(M);
    for (std::size_t j = 0; j < M; ++j) {
        double ev = buf[j].real();
        if (ev < -1e-10) {
            throw InternalError("circulant embedding produced eigenvalue " +
                                std::to_string(ev));
        }
        lambda[j] = ev > 0.0 ? ev : 0.0;
    }

    // Hermitian-symmetric Gaussian spectrum; the draw order (Z0, Zn, then
    // re/im pairs for j = 1..n-1) is part of the reproducibility contract.
    NormalSampler normal(seed);
    buf[0] = std::sqrt(lambda[0]) * normal();
    buf[n] = std::sqrt(lambda[n]) * normal();
    for (std::size_t j = 1; j < n; ++j) {
        double re = normal();
        double im = normal();
        std::complex<double> v = std::sqrt(0.5 * lambda[j]) * std::complex<double>(re, im);
        buf[j] = v;
        buf[M - j] = std::conj(v);
    }
    forward_fft(buf);

    const double scale = std::pow(grid.mesh(), H) / std::sqrt(static_cast<double>(M));
    std::vector<double> path(n + 1);
    path[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        path[k + 1] = path[k] + buf[k].real() * scale;
    }
    return GridPath(grid, std::move(path));
}

}  // namespace roughsde
