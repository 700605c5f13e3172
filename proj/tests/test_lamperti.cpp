#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "roughsde/errors.hpp"
#include "roughsde/fbm.hpp"
#include "roughsde/lamperti.hpp"
#include "roughsde/rng.hpp"

using namespace roughsde;

namespace {

BVFunction step14() { return BVFunction::step(4.0, 4.0 / 3.0); }

// Closed-form transform pair for step14 with base point 0.
double step_lambda(double x) { return x >= 0.0 ? x / 4.0 : 0.75 * x; }
double step_lambda_inv(double y) { return y >= 0.0 ? 4.0 * y : y / 0.75; }

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

TEST_CASE("lambda closed forms") {
    CHECK(lambda(step14(), 0.0, 2.0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(lambda(step14(), 0.0, -2.0) == doctest::Approx(-1.5).epsilon(1e-10));
    CHECK(lambda(BVFunction::power(0.5), 0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(lambda(BVFunction::constant(2.0), -1.0, 3.0) == doctest::Approx(2.0));

    // additivity in the endpoints
    double whole = lambda(step14(), -1.0, 2.0);
    CHECK(whole == doctest::Approx(lambda(step14(), -1.0, 0.5) +
                                   lambda(step14(), 0.5, 2.0)).epsilon(1e-12));
}

TEST_CASE("non-integrable coefficients are refused") {
    CHECK_THROWS_AS(lambda(BVFunction::constant(0.0), 0.0, 1.0), NonIntegrableCoefficient);

    // sigma(x) = x^2 vanishes quadratically: 1/sigma integrable only away from 0.
    using Seg = BVFunction::Segment;
    Seg quad{0.0, 1.0, Seg::Kind::generic, 0.0, 1.0, [](double x) { return x * x; }, true};
    BVFunction sq = BVFunction::from_segments({quad}, {}, 0.0, 1.0);
    CHECK(lambda(sq, 0.5, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS(lambda(sq, 0.0, 0.5), NonIntegrableCoefficient);
}

TEST_CASE("transform inverse closed forms") {
    LampertiTransform ts(step14(), 0.0);
    CHECK(ts.inverse(0.5) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(ts.lambda_at(2.0) == doctest::Approx(0.5).epsilon(1e-10));

    LampertiTransform tp(BVFunction::power(0.5), 0.0);
    CHECK(tp.inverse(2.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("transform round trip on random points") {
    std::mt19937_64 eng(2024);
    std::uniform_real_distribution<double> U(-3.5, 3.5);
    LampertiTransform ts(step14(), 0.0);
    LampertiTransform tc(BVFunction::cantor(0.5), 0.0);
    for (int k = 0; k < 500; ++k) {
        double x = U(eng);
        CHECK(std::abs(ts.inverse(ts.lambda_at(x)) - x) <= 1e-8);
        CHECK(std::abs(tc.inverse(tc.lambda_at(x)) - x) <= 1e-8);
    }
}

TEST_CASE("transform table extends on demand and caps out") {
    LampertiTransform t(step14(), 0.0);
    auto cov0 = t.covered_y();
    t.ensure_range(cov0.first - 10.0, cov0.second + 10.0);
    auto cov1 = t.covered_y();
    CHECK(cov1.first <= cov0.first - 10.0);
    CHECK(cov1.second >= cov0.second + 10.0);
    CHECK(t.inverse(cov0.second + 5.0) ==
          doctest::Approx(step_lambda_inv(cov0.second + 5.0)).epsilon(1e-8));

    TransformOptions tight;
    tight.max_abscissa = 8.0;
    LampertiTransform capped(BVFunction::power(0.5), 0.0, tight);
    // lambda(8) = 2 sqrt(8) < 6, so y = 50 is unreachable under the cap.
    CHECK_THROWS_AS(capped.ensure_range(0.0, 50.0), RangeError);
    CHECK_THROWS_AS(capped.inverse(50.0), RangeError);
}

TEST_CASE("lambda_at is increasing") {
    LampertiTransform t(BVFunction::cantor(0.5), 0.0);
    double prev = t.lambda_at(-3.0);
    for (int k = 1; k <= 60; ++k) {
        double x = -3.0 + 6.0 * k / 60.0;
        double y = t.lambda_at(x);
        CHECK(y > prev);
        prev = y;
    }
    auto cx = t.covered_x();
    CHECK(cx.first <= -3.0);
    CHECK(cx.second >= 3.0);
}

TEST_CASE("solve with constant coefficients is exact") {
    Grid g(1.0, 256);
    GridPath y = sample_fbm(0.75, g, 12);

    SolveResult one = solve(BVFunction::constant(1.0), y, 0.7);
    for (std::size_t k = 0; k < y.values.size(); ++k) {
        CHECK(std::abs(one.X.values[k] - (0.7 + y.values[k] - y.values[0])) <= 1e-9);
    }
    CHECK(one.lambda_defect <= 1e-9);
    CHECK_FALSE(one.residual.has_value());

    SolveResult two = solve(BVFunction::constant(2.0), y, 0.0);
    for (std::size_t k = 0; k < y.values.size(); ++k) {
        CHECK(std::abs(two.X.values[k] - 2.0 * (y.values[k] - y.values[0])) <= 1e-9);
    }
}

TEST_CASE("step solve matches the closed-form composition") {
    Grid g(1.0, 512);
    GridPath y = sample_fbm(0.75, g, 21);
    SolveResult r = solve(step14(), y, 0.0);

    double defect = 0.0;
    for (std::size_t k = 0; k < y.values.size(); ++k) {
        double expect = step_lambda_inv(y.values[k] - y.values[0]);
        CHECK(std::abs(r.X.values[k] - expect) <= 1e-8);
        defect = std::max(defect, std::abs(step_lambda(r.X.values[k]) -
                                           (y.values[k] - y.values[0])));
    }
    CHECK(defect <= 1e-8);
    CHECK(r.lambda_defect <= 1e-8);
}

TEST_CASE("solution responds monotonically to the driver") {
    Grid g(1.0, 256);
    GridPath y = sample_fbm(0.75, g, 33);
    SolveResult r = solve(step14(), y, 0.25);
    for (std::size_t i = 0; i < y.values.size(); ++i) {
        for (std::size_t j = i + 1; j < y.values.size(); ++j) {
            if (y.values[i] <= y.values[j]) {
                CHECK(r.X.values[i] <= r.X.values[j] + 1e-12);
            } else {
                CHECK(r.X.values[i] >= r.X.values[j] - 1e-12);
            }
        }
    }
}

TEST_CASE("negative sigma is rejected") {
    using Seg = BVFunction::Segment;
    Seg neg{0.0, 1.0, Seg::Kind::constant, -1.0, 1.0, nullptr, true};
    BVFunction bad = BVFunction::from_segments({neg}, {}, 0.0, 1.0);
    GridPath y = sample_fbm(0.75, Grid(1.0, 64), 1);
    CHECK_THROWS_AS(solve(bad, y, 0.5), std::invalid_argument);
}

TEST_CASE("range exhaustion names the failure") {
    Grid g(1.0, 64);
    std::vector<double> v(g.nodes());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = 10.0 * g.time(k);
    GridPath y(g, v);

    SolveOptions opt;
    opt.base_point = 1.0;
    opt.transform.max_abscissa = 2.0;
    CHECK_THROWS_AS(solve(BVFunction::power(0.5), y, 1.0, opt), RangeError);
}

TEST_CASE("first-exit scan") {
    // sigma bounded below: never reached.
    GridPath x1 = sample_fbm(0.75, Grid(1.0, 128), 3);
    TauEntry never = tau_epsilon(step14(), x1, 1.0);
    CHECK_FALSE(never.reached);
    CHECK(never.time == 1.0);

    // |1-t|^{1/2} <= 1/2 first at t = 3/4.
    Grid g(1.0, 8);
    std::vector<double> v(g.nodes());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = 1.0 - g.time(k);
    GridPath ramp(g, v);
    TauEntry hit = tau_epsilon(BVFunction::power(0.5), ramp, 0.5);
    CHECK(hit.reached);
    CHECK(hit.time == doctest::Approx(0.75));
    CHECK(hit.first_flagged_node == 6);

    // smaller thresholds are reached no earlier
    GridPath x2 = sample_fbm(0.5, Grid(1.0, 256), 8);
    TauEntry t1 = tau_epsilon(BVFunction::power(0.5), x2, 0.2);
    TauEntry t2 = tau_epsilon(BVFunction::power(0.5), x2, 0.5);
    CHECK(t1.time >= t2.time);
}

TEST_CASE("solve reports the requested exit times") {
    Grid g(1.0, 256);
    GridPath y = sample_fbm(0.75, g, 40);
    SolveOptions opt;
    opt.eps_list = {0.1, 1.5};
    SolveResult r = solve(step14(), y, 0.0, opt);
    REQUIRE(r.tau.size() == 2);
    CHECK(r.tau[0].eps == 0.1);
    CHECK_FALSE(r.tau[0].reached);   // sigma >= 4/3 everywhere
    CHECK(r.tau[1].reached);         // 4/3 < 1.5 whenever X dips below 0
}

TEST_CASE("uniqueness witness: table resolution does not move the solution") {
    Grid g(1.0, 256);
    GridPath y = sample_fbm(0.75, g, 4);

    SolveOptions coarse, fine;
    fine.transform.subdiv_per_piece = 8 * coarse.transform.subdiv_per_piece;

    // generic (tabulated) pieces: cantor sigma
    SolveResult a = solve(BVFunction::cantor(0.5), y, 0.25, coarse);
    SolveResult b = solve(BVFunction::cantor(0.5), y, 0.25, fine);
    TauEntry tau = tau_epsilon(BVFunction::cantor(0.5), a.X, 0.1);
    std::size_t last = tau.reached ? tau.first_flagged_node : a.X.values.size();
    double worst = 0.0;
    for (std::size_t k = 0; k < last; ++k)
        worst = std::max(worst, std::abs(a.X.values[k] - b.X.values[k]));
    CHECK(worst <= 1e-7);

    // closed-form pieces ignore the table density altogether
    SolveResult c = solve(step14(), y, 0.0, coarse);
    SolveResult d = solve(step14(), y, 0.0, fine);
    double worst2 = 0.0;
    for (std::size_t k = 0; k < c.X.values.size(); ++k)
        worst2 = std::max(worst2, std::abs(c.X.values[k] - d.X.values[k]));
    CHECK(worst2 <= 1e-12);
}

TEST_CASE("smooth transform tabulates the reciprocal antiderivative") {
    MollifiedFunction flat = mollify(BVFunction::constant(2.0), 8, Mollifier(64));
    SmoothFn F = smooth_transform(flat, 0.0, -4.0, 4.0, 512);
    CHECK(F.value(3.0) == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(F.value(-2.0) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(F.deriv(1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(F.value(100.0), std::domain_error);
}

TEST_CASE("linear chain rule is limited only by pairing quadrature") {
    // For linear F the chain rule is exact; what remains is the quadrature
    // error of the pairing integral of a constant, which contracts like
    // Delta^0.6 on H=0.75 paths (about 7e-3 at n=2048). Pinned with margin.
    Grid g(1.0, 2048);
    GridPath x = sample_fbm(0.75, g, 17);
    SmoothFn lin{[](double v) { return 2.0 * v + 1.0; }, [](double) { return 2.0; }};
    double res = ito_residual(lin, x, FractionalOrder(0.275));
    CHECK(res <= 2e-2);
    double res_fine = ito_residual(lin, sample_fbm(0.75, Grid(1.0, 8192), 17),
                                   FractionalOrder(0.275));
    CHECK(res_fine <= 8e-3);
}

TEST_CASE("square chain rule residual contracts under refinement") {
    SmoothFn sq{[](double v) { return v * v; }, [](double v) { return 2.0 * v; }};
    std::vector<double> ratios;
    for (int s = 0; s < 7; ++s) {
        double res_c = ito_residual(sq, sample_fbm(0.75, Grid(1.0, 1024), derive_seed(90, s)),
                                    FractionalOrder(0.275));
        double res_f = ito_residual(sq, sample_fbm(0.75, Grid(1.0, 4096), derive_seed(90, s)),
                                    FractionalOrder(0.275));
        ratios.push_back(res_c / res_f);
    }
    CHECK(median(ratios) >= 1.5);
}

TEST_CASE("constant-sigma SDE residual is pure quadrature error") {
    // X = 2Y exactly, so the residual is twice the pairing quadrature error
    // for integrand 1 (ensemble max 2.5e-2 at n=1024). Pinned with margin.
    Grid g(1.0, 1024);
    GridPath y = sample_fbm(0.75, g, 23);
    SolveResult r = solve(BVFunction::constant(2.0), y, 0.0);
    double res = sde_residual(BVFunction::constant(2.0), r.X, y, FractionalOrder(0.275));
    CHECK(res <= 5e-2);
}

TEST_CASE("step SDE residual contracts under refinement") {
    // Ratio of ensemble medians, not median of per-seed ratios: each (seed, n)
    // pair is an independent realization, so per-seed ratios are pure noise.
    std::vector<double> coarse, fine;
    for (int s = 0; s < 20; ++s) {
        for (std::size_t n : {1024u, 2048u}) {
            GridPath y = sample_fbm(0.75, Grid(1.0, n), derive_seed(301, s));
            SolveResult r = solve(step14(), y, 0.0);
            (n == 1024u ? coarse : fine)
                .push_back(sde_residual(step14(), r.X, y, FractionalOrder(0.275)));
        }
    }
    CHECK(median(coarse) / median(fine) >= 1.3);
}

TEST_CASE("mollified transform identity tightens under refinement") {
    // Lambda_n(X_t) - Lambda_n(X_0) = int_0^t sigma(X)/sigma_n(X) dY along the
    // solution, up to quadrature error that refinement shrinks.
    BVFunction sigma = step14();
    Mollifier moll(256);
    MollifiedFunction sn = mollify(sigma, 16, moll);

    auto residual_at = [&](std::size_t n, std::uint64_t seed) {
        Grid g(1.0, n);
        GridPath y = sample_fbm(0.75, g, seed);
        SolveResult r = solve(sigma, y, 0.0);
        double xlo = *std::min_element(r.X.values.begin(), r.X.values.end());
        double xhi = *std::max_element(r.X.values.begin(), r.X.values.end());
        double pad = 0.1 * (xhi - xlo) + 1e-3;
        SmoothFn F = smooth_transform(sn, 0.0, xlo - pad, xhi + pad, 4096);

        GridPath h = r.X;
        for (std::size_t k = 0; k < h.values.size(); ++k) {
            double xv = r.X.values[k];
            h.values[k] = sigma(xv) / sn(xv);
        }
        PairingContext ctx(y, FractionalOrder(0.275));
        double worst = 0.0;
        for (double frac : {0.25, 0.5, 0.75, 1.0}) {
            double t = g.time(static_cast<std::size_t>(frac * n));
            double lhs = F.value(r.X.value_at(t)) - F.value(r.X.values[0]);
            double rhs = ctx.integrate_to(h, t).value;
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        return worst;
    };

    std::vector<double> coarse, fine;
    for (std::uint64_t s = 1; s <= 3; ++s) {
        coarse.push_back(residual_at(512, s));
        fine.push_back(residual_at(2048, s));
    }
    CHECK(median(fine) <= median(coarse));
}
