#pragma once

// Shared kernel internals for the fractional operators. Everything here
// works on raw value vectors over a uniform mesh; the public API in
// frac_calc.hpp/zaehle.hpp wraps these. The zaehle pairing needs the
// boundary and tail parts of the left derivative separately, which is why
// they exist as distinct entry points.

#include <cstddef>
#include <vector>

namespace roughsde::detail {

// out[j] = (j*delta)^e for j = 0..n. out[0] is +inf for e < 0 (callers never
// read it in that case by construction of the sums).
std::vector<double> power_table(std::size_t n, double delta, double e);

std::vector<double> slopes(const std::vector<double>& f, double delta);

// Left Riemann-Liouville integral of order th, product-integration exact for
// piecewise-linear f.
std::vector<double> rl_left_core(const std::vector<double>& f, double T, double th,
                                 bool parallel);

// acc_i = int_0^{t_i} (f(t_i) - f(s)) (t_i - s)^{-1-th} ds, exact for
// piecewise-linear f (the adjacent panel in closed form, so no 0 * inf).
// acc_0 = 0.
std::vector<double> wm_left_diff_core(const std::vector<double>& f, double T, double th,
                                      bool parallel);

// tail: th * acc / Gamma(1-th). full: tail + f(t_i) t_i^-th / Gamma(1-th)
// (node 0: 0 when f[0] == 0, +-inf otherwise).
std::vector<double> wm_left_tail(const std::vector<double>& f, double T, double th,
                                 bool parallel);
std::vector<double> wm_left_full(const std::vector<double>& f, double T, double th,
                                 bool parallel);

// int_0^T v(t) t^-th dt for piecewise-linear v (absolute = integrate |v|,
// splitting panels at sign changes).
double prod_int_power_kernel(const std::vector<double>& v, double T, double th,
                             bool absolute);

double trapezoid_product(const std::vector<double>& a, const std::vector<double>& b,
                         double delta);

// The p-th power of the Gagliardo seminorm (full square [0,T]^2).
double gagliardo_power_sum(const std::vector<double>& f, double T, double th, double p,
                           bool parallel);

// max over nodes of |g(T)-g(t)|/(T-t)^th + max over nodes of the tail
// integral int_t^T |g(t)-g(s)| (s-t)^{-1-th} ds (closed-form panels split at
// sign changes).
double w_infty_core(const std::vector<double>& g, double T, double th, bool parallel);

}  // namespace roughsde::detail
