#pragma once

#include <memory>

#include "roughsde/frac_calc.hpp"
#include "roughsde/grid_path.hpp"

namespace roughsde {

struct IntegralResult {
    double value = 0.0;
    double theta = 0.0;
    // Certified a-priori bound ||f||_{theta,1} * ||g||_{1-theta,infty} /
    // (Gamma(theta) Gamma(1-theta)); |value| <= bound is asserted internally.
    double bound = 0.0;
    double mesh = 0.0;
};

// Pathwise integral int_0^T f dg via the fractional pairing
//   int_0^T (D^theta_{0+} f)(t) (D^{1-theta}_{T-} (g - g(T)))(t) dt
// evaluated with real positive kernels and the compensating overall sign
// (the two one-sided operators as implemented compose to the identity on
// each side; the (-1)^theta phase pair of the complex convention then
// collapses to a single -1 on the whole pairing).
//
// Audits before returning: both norms finite (else InfeasibleIntegrand),
// |value| <= bound + slack (else InternalError).
IntegralResult integrate(const GridPath& f, const GridPath& g, FractionalOrder order);

// int_0^t f dg as integrate(f * 1_[0,t], g): t must be a grid node.
// t == 0 returns exactly 0; t == T takes the identical code path as
// integrate (bit-equal result).
IntegralResult integrate_to(const GridPath& f, const GridPath& g,
                            FractionalOrder order, double t);

// Left-endpoint Riemann-Stieltjes sum on the grid (the classical check).
double riemann_stieltjes(const GridPath& f, const GridPath& g);

// Default pairing order for a driver of Hoelder exponent eta and integrand
// exponent beta: midpoint of the admissible window (1-eta, beta+...)
// clipped into (0.05, 0.95): theta = clip((1 - eta + beta_margin) / 2).
double default_theta(double driver_holder_exponent, double beta = 0.3);

// Caches the driver-side factor D^{1-theta}(g - g(T)) and the driver norm so
// several integrands (or cutoffs) against one g cost one O(n^2) setup plus
// one O(n^2) left-derivative per call.
class PairingContext {
public:
    PairingContext(const GridPath& g, FractionalOrder order);
    ~PairingContext();
    PairingContext(PairingContext&&) noexcept;
    PairingContext& operator=(PairingContext&&) noexcept;

    IntegralResult integrate(const GridPath& f) const;
    IntegralResult integrate_to(const GridPath& f, double t) const;
    double theta() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace roughsde
