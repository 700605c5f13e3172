#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "roughsde/grid_path.hpp"

namespace roughsde {

// Parameters of the small-ball variability functional. q = (beta + eps) /
// alpha below 1 keeps the time integral finite across level crossings; q >= 1
// makes every crossed level report +inf (the assumption then fails loudly).
// Constructor validates the admissible (alpha, beta) window and eps > 0.
struct VariabilityParams {
    double alpha;
    double beta;
    double eps;

    VariabilityParams(double alpha, double beta, double eps);
    double q() const { return (beta + eps) / alpha; }
};

struct DriverSpec {
    double H = 0.5;
    std::uint64_t seed = 0;
    double offset = 0.0;  // added to every path value (shifts the level set)
};

struct VariabilityReport {
    std::vector<double> y;
    std::vector<double> mean_integral;   // Monte Carlo mean of int |X_t - y|^-q dt
    std::vector<double> std_error;
    double sup = 0.0;                    // sup over y of mean_integral
    std::size_t argmax = 0;
    bool stable = false;                 // doubling M moved the sup by < 10%
    std::size_t replicas = 0;            // M used for the reported numbers
    double sup_doubled = 0.0;            // sup from the 2M ensemble (stability check)
    double mean_of_sup = 0.0;            // E[ sup_y int ... ] (reported alongside;
                                         // >= sup by Jensen, the assumption's
                                         // object is sup of the mean)
};

// Deterministic given (driver.seed, params, grid, y_grid, M): replica k uses
// derive_seed(driver.seed, k). Uses replicas 0..2M-1; rows report the first
// M, the rest feed the stability flag.
VariabilityReport estimate_assumption(const DriverSpec& driver,
                                      const VariabilityParams& params,
                                      const std::vector<double>& y_grid,
                                      std::size_t M, const Grid& grid);

// Same estimator on a fixed deterministic path (for closed-form checks).
double mean_integral_single_path(const GridPath& X, double y, double q);

// y grid: empirical range of a pilot ensemble (64 paths) widened by one
// range width on each side, `points` equispaced values.
std::vector<double> default_y_grid(const DriverSpec& driver, const Grid& grid,
                                   int points = 41);

// Improper integral int_0+^T v(t) dt for an integrand that may blow up at 0:
// dyadic shells [2^-(j+1) T, 2^-j T] with adaptive Simpson each, summed until
// the shell tail is provably below tol, or flagged divergent when shell
// masses stop decaying. Returns {finite?, value} (value meaningless when
// divergent).
std::pair<bool, double> improper_time_integral(const std::function<double(double)>& v,
                                               double T, double tol = 1e-8);

// Gaussian density criterion for a variance function V:
// int_0+^T V(t)^-1/2 dt, finite or not. V must be positive on (0, T].
std::pair<bool, double> gaussian_density_criterion(const std::function<double(double)>& V,
                                                   double T, double tol = 1e-8);

}  // namespace roughsde
