#include "roughsde/variability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "roughsde/fbm.hpp"
#include "roughsde/frac_calc.hpp"
#include "roughsde/parallel.hpp"
#include "roughsde/rng.hpp"

namespace roughsde {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

VariabilityParams::VariabilityParams(double alpha, double beta, double eps)
    : alpha(alpha), beta(beta), eps(eps) {
    if (!(alpha > 0.5) || !(alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (1/2, 1)");
    }
    if (!(beta > 1.0 - alpha) || !(beta < alpha)) {
        throw std::invalid_argument("beta must lie in (1 - alpha, alpha)");
    }
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
}

double mean_integral_single_path(const GridPath& X, double y, double q) {
    return time_integral_inverse_distance(X, y, q);
}

VariabilityReport estimate_assumption(const DriverSpec& driver,
                                      const VariabilityParams& params,
                                      const std::vector<double>& y_grid, std::size_t M,
                                      const Grid& grid) {
    if (M < 100) throw std::invalid_argument("need at least 100 replicas");
    if (y_grid.empty()) throw std::invalid_argument("empty level grid");
    // q >= 1 is allowed: every crossed level then reports +inf and the
    // assumption is (correctly) declared failed, never silently truncated
    const double q = params.q();

    const std::size_t R = 2 * M;
    const std::size_t ny = y_grid.size();
    // per-replica row of integrals, then fixed-order reduction
    std::vector<std::vector<double>> rows(R);
    std::vector<double> row_sup(R, 0.0);
    parallel_for(R, [&](std::size_t k) {
        GridPath path = sample_fbm(driver.H, grid, derive_seed(driver.seed, k));
        if (driver.offset != 0.0) {
            for (double& v : path.values) v += driver.offset;
        }
        std::vector<double> row(ny);
        double sup = 0.0;
        for (std::size_t j = 0; j < ny; ++j) {
            row[j] = time_integral_inverse_distance(path, y_grid[j], q);
            sup = std::max(sup, row[j]);
        }
        rows[k] = std::move(row);
        row_sup[k] = sup;
    });

    auto column_means = [&](std::size_t count, std::vector<double>* stderr_out) {
        std::vector<double> mean(ny, 0.0);
        for (std::size_t k = 0; k < count; ++k) {
            for (std::size_t j = 0; j < ny; ++j) mean[j] += rows[k][j];
        }
        for (double& m : mean) m /= static_cast<double>(count);
        if (stderr_out) {
            stderr_out->assign(ny, 0.0);
            for (std::size_t k = 0; k < count; ++k) {
                for (std::size_t j = 0; j < ny; ++j) {
                    const double d = rows[k][j] - mean[j];
                    (*stderr_out)[j] += d * d;
                }
            }
            for (std::size_t j = 0; j < ny; ++j) {
                (*stderr_out)[j] = std::isfinite(mean[j])
                                       ? std::sqrt((*stderr_out)[j] /
                                                   (static_cast<double>(count) *
                                                    static_cast<double>(count - 1)))
                                       : kInf;
            }
        }
        return mean;
    };

    VariabilityReport rep;
    rep.y = y_grid;
    rep.replicas = M;
    rep.mean_integral = column_means(M, &rep.std_error);
    rep.sup = -kInf;
    for (std::size_t j = 0; j < ny; ++j) {
        if (rep.mean_integral[j] > rep.sup) {
            rep.sup = rep.mean_integral[j];
            rep.argmax = j;
        }
    }
    std::vector<double> mean2 = column_means(R, nullptr);
    rep.sup_doubled = *std::max_element(mean2.begin(), mean2.end());
    rep.stable = std::isfinite(rep.sup) && std::isfinite(rep.sup_doubled) &&
                 std::abs(rep.sup_doubled - rep.sup) < 0.1 * rep.sup_doubled;
    double acc = 0.0;
    for (std::size_t k = 0; k < M; ++k) acc += row_sup[k];
    rep.mean_of_sup = acc / static_cast<double>(M);
    return rep;
}

std::vector<double> default_y_grid(const DriverSpec& driver, const Grid& grid, int points) {
    if (points < 3) throw std::invalid_argument("level grid needs at least 3 points");
    double lo = kInf, hi = -kInf;
    for (std::size_t k = 0; k < 64; ++k) {
        GridPath path = sample_fbm(driver.H, grid, derive_seed(driver.seed, k));
        for (double v : path.values) {
            lo = std::min(lo, v + driver.offset);
            hi = std::max(hi, v + driver.offset);
        }
    }
    const double width = std::max(hi - lo, 1e-6);
    lo -= width;
    hi += width;
    std::vector<double> y(points);
    for (int j = 0; j < points; ++j) {
        y[j] = lo + (hi - lo) * static_cast<double>(j) / (points - 1);
    }
    return y;
}

namespace {

double shell_simpson(const std::function<double(double)>& v, double a, double b,
                     double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double fa = v(a), fm = v(m), fb = v(b);
    if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb)) return kInf;
    struct Rec {
        const std::function<double(double)>& v;
        double operator()(double a, double b, double fa, double fm, double fb, double whole,
                          double tol, int depth) const {
            const double m = 0.5 * (a + b);
            const double flm = v(0.5 * (a + m));
            const double frm = v(0.5 * (m + b));
            if (!std::isfinite(flm) || !std::isfinite(frm)) return kInf;
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
                return left + right + (left + right - whole) / 15.0;
            }
            return (*this)(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   (*this)(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    } rec{v};
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return rec(a, b, fa, fm, fb, whole, tol, depth);
}

}  // namespace

std::pair<bool, double> improper_time_integral(const std::function<double(double)>& v,
                                               double T, double tol) {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("horizon must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    double total = 0.0;
    double prev = kInf;
    constexpr int max_shells = 2048;
    for (int j = 0; j < max_shells; ++j) {
        const double b = std::ldexp(T, -j);
        if (b == 0.0) break;
        const double a = 0.5 * b;
        const double local_tol = tol * 0.1 / ((j + 1.0) * (j + 2.0));
        const double s = shell_simpson(v, a, b, local_tol, 28);
        if (!std::isfinite(s)) return {false, kInf};
        total += s;
        if (j >= 16 && prev > 0.0 && s >= prev * (1.0 - 1e-4)) {
            // shell masses stopped decaying: geometric tail argument fails
            return {false, kInf};
        }
        if (j >= 1 && prev > 0.0 && s < prev) {
            const double ratio = s / prev;
            const double tail = s * ratio / (1.0 - ratio);
            if (std::isfinite(tail) && tail < 0.5 * tol) return {true, total + tail};
        }
        if (s == 0.0 && j >= 4) return {true, total};
        prev = s;
    }
    return {false, kInf};
}

std::pair<bool, double> gaussian_density_criterion(const std::function<double(double)>& V,
                                                   double T, double tol) {
    auto integrand = [&V](double t) {
        const double var = V(t);
        if (!(var > 0.0)) {
            throw std::invalid_argument("variance function must be positive on (0, T]");
        }
        return 1.0 / std::sqrt(var);
    };
    return improper_time_integral(integrand, T, tol);
}

}  // namespace roughsde
