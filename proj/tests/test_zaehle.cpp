#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "roughsde/fbm.hpp"
#include "roughsde/rng.hpp"
#include "roughsde/zaehle.hpp"

using namespace roughsde;

namespace {

GridPath constant_path(const Grid& g, double c) {
    return GridPath(g, std::vector<double>(g.nodes(), c));
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

TEST_CASE("stieltjes oracles against polynomial paths") {
    Grid g(1.0, 1024);
    GridPath one = constant_path(g, 1.0);
    GridPath ramp = deterministic_path(DeterministicKind::identity, g);
    GridPath sq = deterministic_path(DeterministicKind::square, g);

    // int_0^1 1 d(t^2) = 1
    IntegralResult a = integrate(one, sq, FractionalOrder(0.4));
    CHECK(std::abs(a.value - 1.0) < 1e-3);
    CHECK(a.theta == 0.4);
    CHECK(a.mesh == doctest::Approx(g.mesh()));
    CHECK(std::abs(a.value) <= a.bound + 1e-6);

    // int_0^1 t d(t^2) = 2/3
    IntegralResult b = integrate(ramp, sq, FractionalOrder(0.4));
    CHECK(std::abs(b.value - 2.0 / 3.0) < 1e-3);

    // the value does not depend on the split order
    IntegralResult t3 = integrate(ramp, sq, FractionalOrder(0.3));
    IntegralResult t6 = integrate(ramp, sq, FractionalOrder(0.6));
    CHECK(std::abs(t3.value - t6.value) < 2e-3);
}

TEST_CASE("integrate_to restriction") {
    Grid g(1.0, 1024);
    GridPath one = constant_path(g, 1.0);
    GridPath sq = deterministic_path(DeterministicKind::square, g);
    FractionalOrder th(0.4);

    IntegralResult z = integrate_to(one, sq, th, 0.0);
    CHECK(z.value == 0.0);

    IntegralResult full = integrate(one, sq, th);
    IntegralResult full_to = integrate_to(one, sq, th, 1.0);
    CHECK(full.value == full_to.value);  // identical code path, bit-equal

    // int_0^{1/2} d(t^2) = 1/4
    IntegralResult half = integrate_to(one, sq, th, 0.5);
    CHECK(std::abs(half.value - 0.25) < 1e-3);

    CHECK_THROWS_AS(integrate_to(one, sq, th, 0.5 + 0.3 * g.mesh()),
                    std::invalid_argument);
}

TEST_CASE("interval increments match the cutoff difference exactly") {
    Grid g(1.0, 512);
    GridPath f = deterministic_path(DeterministicKind::sine, g);
    GridPath gpath = deterministic_path(DeterministicKind::square, g);
    FractionalOrder th(0.35);

    double t1 = 0.25, t2 = 0.75;
    double d = integrate_to(f, gpath, th, t2).value - integrate_to(f, gpath, th, t1).value;

    GridPath window = f;
    std::size_t c1 = g.index_of(t1), c2 = g.index_of(t2);
    for (std::size_t k = 0; k < window.values.size(); ++k) {
        if (k <= c1 || k > c2) window.values[k] = 0.0;
    }
    // the pairing is linear in the integrand, so the nodal identity
    // 1_(t1,t2] = 1_[0,t2] - 1_[0,t1] transfers to the values
    double w = integrate(window, gpath, th).value;
    CHECK(std::abs(d - w) < 1e-9);
}

TEST_CASE("pairing is linear in the integrand") {
    Grid g(1.0, 256);
    GridPath f1 = deterministic_path(DeterministicKind::sine, g);
    GridPath f2 = deterministic_path(DeterministicKind::square, g);
    GridPath drv = sample_fbm(0.8, g, 31);
    FractionalOrder th(0.35);

    GridPath mix = f1;
    for (std::size_t k = 0; k < mix.values.size(); ++k)
        mix.values[k] = 2.0 * f1.values[k] + 3.0 * f2.values[k];

    double lhs = integrate(mix, drv, th).value;
    double rhs = 2.0 * integrate(f1, drv, th).value + 3.0 * integrate(f2, drv, th).value;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));
}

TEST_CASE("riemann-stieltjes left sums") {
    Grid g(1.0, 4096);
    GridPath ramp = deterministic_path(DeterministicKind::identity, g);
    GridPath sq = deterministic_path(DeterministicKind::square, g);
    GridPath c = constant_path(g, -2.5);
    GridPath drv = sample_fbm(0.6, g, 5);

    CHECK(riemann_stieltjes(c, drv) ==
          doctest::Approx(-2.5 * (drv.values.back() - drv.values.front()))
              .epsilon(1e-12));
    CHECK(std::abs(riemann_stieltjes(ramp, sq) - 2.0 / 3.0) < 1e-3);
}

TEST_CASE("certified bound holds on randomized holder pairs") {
    std::size_t violations = 0;
    for (int r = 0; r < 100; ++r) {
        double hf = 0.6 + 0.3 * ((r * 7) % 10) / 10.0;
        double hg = 0.55 + 0.4 * ((r * 3) % 10) / 10.0;
        Grid g(1.0, 256);
        GridPath f = sample_fbm(hf, g, derive_seed(777, 2 * r));
        GridPath drv = sample_fbm(hg, g, derive_seed(777, 2 * r + 1));
        double theta = std::clamp(0.5 * (1.0 - hg + hf - 0.05), 0.1, 0.9);
        IntegralResult res = integrate(f, drv, FractionalOrder(theta));
        if (!(std::abs(res.value) <= res.bound + 1e-6)) ++violations;
        CHECK(std::isfinite(res.value));
    }
    CHECK(violations == 0);
}

TEST_CASE("agreement with riemann-stieltjes tightens under refinement") {
    // Lipschitz integrand against a smooth-ish driver: both quadratures
    // converge to the Young integral, so their gap contracts with the mesh.
    std::vector<double> r1s, r2s;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        std::vector<double> gap;
        for (std::size_t n : {256u, 512u, 1024u}) {
            Grid g(1.0, n);
            GridPath f = deterministic_path(DeterministicKind::sine, g);
            GridPath drv = sample_fbm(0.9, g, seed);
            double z = integrate(f, drv, FractionalOrder(0.2)).value;
            double rs = riemann_stieltjes(f, drv);
            gap.push_back(std::abs(z - rs));
        }
        r1s.push_back(gap[0] / gap[1]);
        r2s.push_back(gap[1] / gap[2]);
    }
    CHECK(median(r1s) >= 1.4);
    CHECK(median(r2s) >= 1.4);
}

TEST_CASE("default pairing order") {
    CHECK(default_theta(0.75, 0.3) == doctest::Approx(0.275));
    CHECK(default_theta(0.99, 0.02) == doctest::Approx(0.05));   // clipped low
    CHECK(default_theta(0.05, 0.99 - 1e-9) == doctest::Approx(0.95));  // clipped high
    CHECK_THROWS_AS(default_theta(0.0, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(default_theta(1.0, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(default_theta(0.75, 0.0), std::invalid_argument);
}

TEST_CASE("pairing context matches the one-shot entry points") {
    Grid g(1.0, 512);
    GridPath f = deterministic_path(DeterministicKind::sine, g);
    GridPath drv = sample_fbm(0.75, g, 9);
    FractionalOrder th(0.3);

    PairingContext ctx(drv, th);
    CHECK(ctx.theta() == 0.3);
    CHECK(ctx.integrate(f).value == integrate(f, drv, th).value);
    CHECK(ctx.integrate_to(f, 0.5).value == integrate_to(f, drv, th, 0.5).value);
}

TEST_CASE("mismatched grids are rejected") {
    GridPath f = deterministic_path(DeterministicKind::sine, Grid(1.0, 64));
    GridPath drv = sample_fbm(0.75, Grid(1.0, 128), 1);
    CHECK_THROWS_AS(integrate(f, drv, FractionalOrder(0.3)), std::invalid_argument);
    GridPath drv2 = sample_fbm(0.75, Grid(2.0, 64), 1);
    CHECK_THROWS_AS(integrate(f, drv2, FractionalOrder(0.3)), std::invalid_argument);
}
