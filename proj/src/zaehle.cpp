#include "roughsde/zaehle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "frac_detail.hpp"
#include "roughsde/errors.hpp"

namespace roughsde {

namespace {

void check_same_grid(const GridPath& f, const GridPath& g) {
    if (f.grid.n != g.grid.n || f.grid.T != g.grid.T) {
        throw std::invalid_argument("integrand and driver must share one grid");
    }
}

}  // namespace

struct PairingContext::Impl {
    Grid grid{1.0, 2};
    double theta = 0.5;
    double gamma_th = 1.0;
    double gamma_1mth = 1.0;
    std::vector<double> W;   // right-sided derivative of g - g(T), order 1-theta
    double g_norm = 0.0;     // ||g||_{1-theta,infty}
    bool g_norm_finite = true;

    Impl(const GridPath& g, FractionalOrder order)
        : grid(g.grid), theta(order.theta) {
        validate(g);
        gamma_th = std::tgamma(theta);
        gamma_1mth = std::tgamma(1.0 - theta);
        std::vector<double> h(g.values.rbegin(), g.values.rend());
        const double anchor = h[0];
        for (double& x : h) x -= anchor;
        W = detail::wm_left_full(h, grid.T, 1.0 - theta, true);
        std::reverse(W.begin(), W.end());
        g_norm = detail::w_infty_core(g.values, grid.T, 1.0 - theta, true);
        g_norm_finite = std::isfinite(g_norm);
    }

    IntegralResult pair(const GridPath& f) const {
        if (f.grid.n != grid.n || f.grid.T != grid.T) {
            throw std::invalid_argument("integrand and driver must share one grid");
        }
        validate(f);
        if (!g_norm_finite) {
            throw InfeasibleIntegrand("w_infty(g)", 1.0 - theta, g_norm);
        }
        const double f_norm =
            detail::prod_int_power_kernel(f.values, grid.T, theta, true) +
            0.5 * detail::gagliardo_power_sum(f.values, grid.T, theta, 1.0, true);
        if (!std::isfinite(f_norm)) {
            throw InfeasibleIntegrand("w_theta_1(f)", theta, f_norm);
        }
        std::vector<double> fw(f.values.size());
        for (std::size_t k = 0; k < fw.size(); ++k) fw[k] = f.values[k] * W[k];
        const std::vector<double> B = detail::wm_left_tail(f.values, grid.T, theta, true);
        const double term1 =
            detail::prod_int_power_kernel(fw, grid.T, theta, false) / gamma_1mth;
        const double term2 = detail::trapezoid_product(B, W, grid.mesh());
        IntegralResult res;
        res.value = -(term1 + term2);
        res.theta = theta;
        res.bound = f_norm * g_norm / (gamma_th * gamma_1mth);
        res.mesh = grid.mesh();
        if (!std::isfinite(res.value) || std::abs(res.value) > res.bound + 1e-6) {
            throw InternalError("pairing value escaped its certified bound");
        }
        return res;
    }
};

PairingContext::PairingContext(const GridPath& g, FractionalOrder order)
    : impl_(std::make_unique<Impl>(g, order)) {}
PairingContext::~PairingContext() = default;
PairingContext::PairingContext(PairingContext&&) noexcept = default;
PairingContext& PairingContext::operator=(PairingContext&&) noexcept = default;

IntegralResult PairingContext::integrate(const GridPath& f) const {
    return impl_->pair(f);
}

IntegralResult PairingContext::integrate_to(const GridPath& f, double t) const {
    if (t == 0.0) {
        IntegralResult res;
        res.value = 0.0;
        res.theta = impl_->theta;
        res.bound = 0.0;
        res.mesh = impl_->grid.mesh();
        return res;
    }
    const std::size_t cut = impl_->grid.index_of(t);
    GridPath trimmed = f;
    for (std::size_t k = cut + 1; k < trimmed.values.size(); ++k) trimmed.values[k] = 0.0;
    return impl_->pair(trimmed);
}

double PairingContext::theta() const { return impl_->theta; }

IntegralResult integrate(const GridPath& f, const GridPath& g, FractionalOrder order) {
    check_same_grid(f, g);
    return PairingContext(g, order).integrate(f);
}

IntegralResult integrate_to(const GridPath& f, const GridPath& g, FractionalOrder order,
                            double t) {
    check_same_grid(f, g);
    return PairingContext(g, order).integrate_to(f, t);
}

double riemann_stieltjes(const GridPath& f, const GridPath& g) {
    check_same_grid(f, g);
    validate(f);
    validate(g);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < f.values.size(); ++k) {
        acc += f.values[k] * (g.values[k + 1] - g.values[k]);
    }
    return acc;
}

double default_theta(double driver_holder_exponent, double beta) {
    if (!(driver_holder_exponent > 0.0) || !(driver_holder_exponent < 1.0)) {
        throw std::invalid_argument("driver holder exponent must lie in (0,1)");
    }
    if (!(beta > 0.0) || !(beta < 1.0)) {
        throw std::invalid_argument("beta must lie in (0,1)");
    }
    return std::clamp((1.0 - driver_holder_exponent + beta) / 2.0, 0.05, 0.95);
}

}  // namespace roughsde
