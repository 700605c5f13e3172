#include "roughsde/grid_path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roughsde {

Grid::Grid(double T, std::size_t n) : T(T), n(n) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw std::invalid_argument("grid horizon must be positive and finite");
    }
    if (n < 2) {
        throw std::invalid_argument("grid needs at least 2 steps");
    }
}

std::size_t Grid::index_of(double t) const {
    double k = t / mesh();
    double r = std::round(k);
    if (r < 0.0 || r > static_cast<double>(n) ||
        std::abs(t - r * mesh()) > 1e-9 * std::max(1.0, T)) {
        throw std::invalid_argument("time is not a grid node");
    }
    return static_cast<std::size_t>(r);
}

GridPath::GridPath(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    validate(*this);
}

double GridPath::value_at(double t) const {
    if (t < 0.0 || t > grid.T * (1.0 + 1e-12)) {
        throw std::invalid_argument("evaluation time outside [0, T]");
    }
    double pos = std::min(t / mesh(), static_cast<double>(grid.n));
    auto k = static_cast<std::size_t>(pos);
    if (k >= grid.n) return values.back();
    double frac = pos - static_cast<double>(k);
    return values[k] + frac * (values[k + 1] - values[k]);
}

void validate(const GridPath& path) {
    if (path.values.size() != path.grid.nodes()) {
        throw std::invalid_argument("path length does not match grid");
    }
    for (double v : path.values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("path contains a non-finite value");
        }
    }
}

GridPath coarsen(const GridPath& path) {
    std::size_t n = path.grid.n;
    if (n % 2 != 0 || n < 4) {
        throw std::invalid_argument("coarsen needs an even step count >= 4");
    }
    std::vector<double> half(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k) half[k] = path.values[2 * k];
    return GridPath(Grid(path.grid.T, n / 2), std::move(half));
}

DeterministicKind deterministic_kind_from_name(const std::string& name) {
    if (name == "identity") return DeterministicKind::identity;
    if (name == "square") return DeterministicKind::square;
    if (name == "sine") return DeterministicKind::sine;
    throw std::invalid_argument("unknown deterministic path kind: " + name);
}

GridPath deterministic_path(DeterministicKind kind, const Grid& grid) {
    std::vector<double> v(grid.nodes());
    for (std::size_t k = 0; k < v.size(); ++k) {
        double t = grid.time(k);
        switch (kind) {
            case DeterministicKind::identity: v[k] = t; break;
            case DeterministicKind::square: v[k] = t * t; break;
            case DeterministicKind::sine: v[k] = std::sin(t); break;
        }
    }
    return GridPath(grid, std::move(v));
}

namespace {

// Largest ratio |x_j - x_i| / ((j-i) * mesh)^theta over the given lag.
double lag_sup(const GridPath& path, std::size_t lag, double theta) {
    double dt = static_cast<double>(lag) * path.mesh();
    double denom = std::pow(dt, theta);
    double best = 0.0;
    for (std::size_t i = 0; i + lag < path.values.size(); ++i) {
        best = std::max(best, std::abs(path.values[i + lag] - path.values[i]));
    }
    return best / denom;
}

}  // namespace

double holder_seminorm(const GridPath& path, double theta) {
    if (!(theta > 0.0) || !(theta <= 1.0)) {
        throw std::invalid_argument("holder exponent must lie in (0,1]");
    }
    std::size_t n = path.grid.n;
    double best = 0.0;
    if (n <= 4096) {
        for (std::size_t lag = 1; lag <= n; ++lag) best = std::max(best, lag_sup(path, lag, theta));
        return best;
    }
    for (std::size_t lag = 1; lag <= n; lag *= 2) best = std::max(best, lag_sup(path, lag, theta));
    // anchored full spans catch the largest-scale pairs the dyadic scan skips
    double denom_n = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dt = path.grid.T - path.grid.time(i);
        denom_n = std::abs(path.values[n] - path.values[i]) / std::pow(dt, theta);
        best = std::max(best, denom_n);
        double dt0 = path.grid.time(n - i);
        best = std::max(best, std::abs(path.values[n - i] - path.values[0]) / std::pow(dt0, theta));
    }
    return best;
}

double estimate_holder_exponent(const GridPath& path) {
    std::size_t n = path.grid.n;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t lag = 1; lag <= n / 4; lag *= 2) {
        double sup = 0.0;
        for (std::size_t i = 0; i + lag < path.values.size(); ++i) {
            sup = std::max(sup, std::abs(path.values[i + lag] - path.values[i]));
        }
        if (sup <= 0.0) continue;
        double x = std::log(static_cast<double>(lag) * path.mesh());
        double y = std::log(sup);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    if (m < 2) return 0.5;
    double slope = (static_cast<double>(m) * sxy - sx * sy) / (static_cast<double>(m) * sxx - sx * sx);
    return std::clamp(slope, 0.05, 0.99);
}

}  // namespace roughsde
