#include "roughsde/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

// Each kernel below is a plain serial transcription of the defining sum. The
// per-element arithmetic (operation order, pow arguments) is kept identical to
// the production kernels so that the parity test can assert bitwise equality.
namespace roughsde::ref {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double pow_p(double x, double p) {
    if (p == 1.0) return x;
    if (p == 2.0) return x * x;
    return std::pow(x, p);
}

std::vector<double> reversed(const std::vector<double>& v) {
    return std::vector<double>(v.rbegin(), v.rend());
}

std::vector<double> rl_left_serial(const std::vector<double>& f, double T, double th) {
    const std::size_t n = f.size() - 1;
    const double D = T / static_cast<double>(n);
    const double g = std::tgamma(th);
    std::vector<double> out(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < i; ++k) {
            const std::size_t vk = i - k;
            const double b = (f[k + 1] - f[k]) / D;
            const double A = f[k] + b * (static_cast<double>(vk) * D);
            const double pu = std::pow(static_cast<double>(vk) * D, th);
            const double pl = vk == 1 ? 0.0 : std::pow(static_cast<double>(vk - 1) * D, th);
            const double qu = std::pow(static_cast<double>(vk) * D, th + 1.0);
            const double ql =
                vk == 1 ? 0.0 : std::pow(static_cast<double>(vk - 1) * D, th + 1.0);
            acc += A * (pu - pl) / th - b * (qu - ql) / (th + 1.0);
        }
        out[i] = acc / g;
    }
    return out;
}

std::vector<double> wm_left_full_serial(const std::vector<double>& f, double T, double th) {
    const std::size_t n = f.size() - 1;
    const double D = T / static_cast<double>(n);
    const double g = std::tgamma(1.0 - th);
    std::vector<double> out(n + 1);
    out[0] = f[0] == 0.0 ? 0.0 : std::copysign(kInf, f[0]);
    for (std::size_t i = 1; i <= n; ++i) {
        const double bi = (f[i] - f[i - 1]) / D;
        double acc = bi * std::pow(D, 1.0 - th) / (1.0 - th);
        for (std::size_t k = 0; k + 1 < i; ++k) {
            const std::size_t vk = i - k;
            const double b = (f[k + 1] - f[k]) / D;
            const double ck = f[i] - f[k] - b * (static_cast<double>(vk) * D);
            const double mu = std::pow(static_cast<double>(vk) * D, -th);
            const double ml = std::pow(static_cast<double>(vk - 1) * D, -th);
            const double pu = std::pow(static_cast<double>(vk) * D, 1.0 - th);
            const double pl = std::pow(static_cast<double>(vk - 1) * D, 1.0 - th);
            acc += ck * (ml - mu) / th + b * (pu - pl) / (1.0 - th);
        }
        out[i] = (f[i] * std::pow(static_cast<double>(i) * D, -th) + th * acc) / g;
    }
    return out;
}

double corner_square(double bi, double bj, double p, double q, double x0, double y0,
                     double w) {
    double acc = 0.0;
    for (int ii = 0; ii < 3; ++ii) {
        const double x = x0 + (ii + 0.5) * w / 3.0;
        for (int jj = 0; jj < 3; ++jj) {
            const double y = y0 + (jj + 0.5) * w / 3.0;
            acc += pow_p(std::abs(bj * x + bi * y), p) * std::pow(x + y, -1.0 - q);
        }
    }
    return acc * (w / 3.0) * (w / 3.0);
}

double adjacent_shells(double bi, double bj, double D, double p, double q) {
    double total = 0.0;
    double a = D;
    for (int lvl = 0; lvl < 60; ++lvl) {
        const double h = 0.5 * a;
        const double s = corner_square(bi, bj, p, q, h, 0.0, h) +
                         corner_square(bi, bj, p, q, h, h, h) +
                         corner_square(bi, bj, p, q, 0.0, h, h);
        total += s;
        if (s <= 1e-16 * total) break;
        a = h;
    }
    return total;
}

}  // namespace

GridPath rl_integral(const GridPath& f, FractionalOrder order, Side side) {
    validate(f);
    if (side == Side::left) {
        return GridPath{f.grid, rl_left_serial(f.values, f.grid.T, order.theta)};
    }
    auto out = rl_left_serial(reversed(f.values), f.grid.T, order.theta);
    return GridPath{f.grid, reversed(out)};
}

GridPath wm_derivative(const GridPath& f, FractionalOrder order, Side side,
                       bool subtract_terminal) {
    validate(f);
    std::vector<double> v = side == Side::left ? f.values : reversed(f.values);
    if (subtract_terminal) {
        const double anchor = v[0];
        for (double& x : v) x -= anchor;
    }
    std::vector<double> out = wm_left_full_serial(v, f.grid.T, order.theta);
    if (side == Side::right) out = reversed(out);
    GridPath result;
    result.grid = f.grid;
    result.values = std::move(out);
    return result;
}

double gagliardo_seminorm(const GridPath& f, FractionalOrder order, double p) {
    validate(f);
    if (!(p >= 1.0)) throw std::invalid_argument("gagliardo exponent p must be >= 1");
    const std::size_t n = f.grid.n;
    const double T = f.grid.T;
    const double th = order.theta;
    const double D = T / static_cast<double>(n);
    const std::vector<double>& x = f.values;
    std::vector<double> b(n);
    for (std::size_t k = 0; k < n; ++k) b[k] = (x[k + 1] - x[k]) / D;
    const double q = th * p;
    const double c = p - 1.0 - q;
    const double diag_const = std::pow(D, c + 2.0) / ((c + 1.0) * (c + 2.0));
    const double eq_adj_const =
        (std::pow(2.0 * D, c + 2.0) - 2.0 * std::pow(D, c + 2.0)) / ((c + 1.0) * (c + 2.0));
    const double mint =
        p == 1.0 ? (std::pow(D, 2.0 - q) / q) * ((2.0 - std::pow(2.0, 2.0 - q)) / (2.0 - q) +
                                                 (std::pow(2.0, 1.0 - q) - 1.0) / (1.0 - q))
                 : 0.0;
    double total = 0.0;
    for (std::size_t ci = 0; ci < n; ++ci) {
        double acc = 2.0 * pow_p(std::abs(b[ci]), p) * diag_const;
        if (ci + 1 < n) {
            const std::size_t cj = ci + 1;
            if (b[ci] == b[cj]) {
                acc += 2.0 * pow_p(std::abs(b[ci]), p) * eq_adj_const;
            } else if (p == 1.0 && b[ci] * b[cj] >= 0.0) {
                acc += 2.0 * (std::abs(b[ci]) + std::abs(b[cj])) * mint;
            } else {
                acc += 2.0 * adjacent_shells(b[ci], b[cj], D, p, q);
            }
        }
        for (std::size_t cj = ci + 2; cj < n; ++cj) {
            const std::size_t d = cj - ci;
            const double Kd = std::pow(static_cast<double>(d) * D, -1.0 - q);
            const double Kdm = std::pow(static_cast<double>(d - 1) * D, -1.0 - q);
            const double Kdp = std::pow(static_cast<double>(d + 1) * D, -1.0 - q);
            const double corner = pow_p(std::abs(x[cj] - x[ci]), p) * Kd +
                                  pow_p(std::abs(x[cj + 1] - x[ci + 1]), p) * Kd +
                                  pow_p(std::abs(x[cj] - x[ci + 1]), p) * Kdm +
                                  pow_p(std::abs(x[cj + 1] - x[ci]), p) * Kdp;
            acc += 0.5 * D * D * corner;
        }
        total += acc;
    }
    return p == 1.0 ? total : std::pow(total, 1.0 / p);
}

double holder_seminorm(const GridPath& path, double theta) {
    if (!(theta > 0.0) || !(theta <= 1.0)) {
        throw std::invalid_argument("holder exponent must lie in (0,1]");
    }
    const std::size_t n = path.grid.n;
    double best = 0.0;
    for (std::size_t lag = 1; lag <= n; ++lag) {
        const double dt = static_cast<double>(lag) * path.mesh();
        const double denom = std::pow(dt, theta);
        double sup = 0.0;
        for (std::size_t i = 0; i + lag < path.values.size(); ++i) {
            sup = std::max(sup, std::abs(path.values[i + lag] - path.values[i]));
        }
        best = std::max(best, sup / denom);
    }
    return best;
}

}  // namespace roughsde::ref
