#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace roughsde {

// Uniform grid t_k = k*T/n, k = 0..n.
struct Grid {
    double T = 1.0;
    std::size_t n = 1;

    Grid() = default;
    Grid(double T, std::size_t n);

    double mesh() const { return T / static_cast<double>(n); }
    std::size_t nodes() const { return n + 1; }
    double time(std::size_t k) const { return T * static_cast<double>(k) / static_cast<double>(n); }

    // Index of the node at time t, or throws std::invalid_argument if t is
    // not a grid node (up to 1e-9 * max(1, T)).
    std::size_t index_of(double t) const;

    bool operator==(const Grid& other) const { return T == other.T && n == other.n; }
};

// A path sampled at the grid nodes, interpreted as piecewise linear between
// them. values.size() == grid.nodes().
struct GridPath {
    Grid grid;
    std::vector<double> values;

    GridPath() = default;
    GridPath(Grid g, std::vector<double> v);

    std::size_t nodes() const { return values.size(); }
    double mesh() const { return grid.mesh(); }
    double operator[](std::size_t k) const { return values[k]; }

    // Piecewise-linear evaluation; t must lie in [0, T].
    double value_at(double t) const;

    // Node spacing in value: slope of panel k is (values[k+1]-values[k])/mesh.
    double slope(std::size_t k) const { return (values[k + 1] - values[k]) / mesh(); }
};

// Throws std::invalid_argument when values contain non-finite entries or the
// length does not match the grid.
void validate(const GridPath& path);

// Keep every other node; n must be even and >= 4.
GridPath coarsen(const GridPath& path);

enum class DeterministicKind { identity, square, sine };
DeterministicKind deterministic_kind_from_name(const std::string& name);

// identity: x(t) = t, square: x(t) = t^2, sine: x(t) = sin(t).
GridPath deterministic_path(DeterministicKind kind, const Grid& grid);

// sup over all node pairs s < t of |x(t)-x(s)| / (t-s)^theta.
// Exact over all pairs for n <= 4096; above that, dyadic lags plus all
// full-span anchors (documented approximation).
double holder_seminorm(const GridPath& path, double theta);

// Crude exponent read-off: least-squares slope of log sup|increment| vs log
// lag over dyadic lags; clipped to [0.05, 0.99].
double estimate_holder_exponent(const GridPath& path);

}  // namespace roughsde
