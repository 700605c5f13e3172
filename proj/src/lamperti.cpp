#include "roughsde/lamperti.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "roughsde/errors.hpp"
#include "roughsde/parallel.hpp"

namespace roughsde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double simpson_recurse(const std::function<double(double)>& h, double a, double b,
                       double fa, double fm, double fb, double whole, double tol,
                       int depth, double where) {
    const double m = 0.5 * (a + b);
    const double flm = h(0.5 * (a + m));
    const double frm = h(0.5 * (m + b));
    if (!std::isfinite(flm) || !std::isfinite(frm)) {
        throw NonIntegrableCoefficient(m, "integrand is not finite");
    }
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson_recurse(h, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, where) +
           simpson_recurse(h, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, where);
}

double adaptive_simpson(const std::function<double(double)>& h, double a, double b,
                        double tol, int depth = 24) {
    if (a == b) return 0.0;
    const double fa = h(a), fm = h(0.5 * (a + b)), fb = h(b);
    if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb)) {
        throw NonIntegrableCoefficient(0.5 * (a + b), "integrand is not finite");
    }
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(h, a, b, fa, fm, fb, whole, tol, depth, 0.5 * (a + b));
}

// Antiderivative of 1/|x|^gamma, odd and increasing where defined.
double power_antideriv(double x, double gamma) {
    if (gamma == 1.0) {
        return x > 0.0 ? std::log(x) : -std::log(-x);
    }
    return std::copysign(std::pow(std::abs(x), 1.0 - gamma), x) / (1.0 - gamma);
}

double power_antideriv_inv(double s, double gamma, double side) {
    if (gamma == 1.0) {
        return side > 0.0 ? std::exp(s) : -std::exp(-s);
    }
    if (gamma < 1.0) {
        return std::copysign(std::pow(std::abs(s) * (1.0 - gamma), 1.0 / (1.0 - gamma)), s);
    }
    // gamma > 1: branch fixed by the sign of the piece
    const double w = side > 0.0 ? (1.0 - gamma) * s : (1.0 - gamma) * (-s);
    const double mag = std::pow(w, 1.0 / (1.0 - gamma));
    return side > 0.0 ? mag : -mag;
}

// int_u^x 1/sigma over a subinterval of one piece, closed form where the
// classification allows it.
double piece_integral_impl(const BVFunction& sigma, const PieceView& v, double u, double x,
                           double quad_tol) {
    if (u == x) return 0.0;
    switch (v.kind) {
        case PieceView::Kind::constant_value:
            if (v.value == 0.0) {
                throw NonIntegrableCoefficient(0.5 * (u + x), "sigma vanishes on an interval");
            }
            return (x - u) / v.value;
        case PieceView::Kind::power_abs:
            if (v.offset == 0.0) {
                if (v.gamma >= 1.0 && std::min(u, x) <= 0.0 && std::max(u, x) >= 0.0) {
                    throw NonIntegrableCoefficient(
                        0.0, "power zero with exponent >= 1 inside the interval");
                }
                return power_antideriv(x, v.gamma) - power_antideriv(u, v.gamma);
            }
            [[fallthrough]];
        case PieceView::Kind::generic:
            break;
    }
    return adaptive_simpson([&sigma](double t) { return 1.0 / sigma(t); }, u, x, quad_tol);
}

}  // namespace

double lambda(const BVFunction& sigma, double a, double x) {
    if (!std::isfinite(a) || !std::isfinite(x)) {
        throw std::invalid_argument("lambda endpoints must be finite");
    }
    if (a == x) return 0.0;
    const double sign = x > a ? 1.0 : -1.0;
    const double lo = std::min(a, x), hi = std::max(a, x);
    double acc = 0.0;
    for (const PieceView& v : sigma.pieces(lo, hi)) {
        acc += piece_integral_impl(sigma, v, v.lo, v.hi, 1e-12);
    }
    return sign * acc;
}

LampertiTransform::LampertiTransform(BVFunction sigma, double a, TransformOptions opt)
    : sigma_(std::move(sigma)), a_(a), opt_(opt) {
    if (!std::isfinite(a_)) throw std::invalid_argument("base point must be finite");
    if (sigma_.lower_bound() < 0.0) {
        throw std::invalid_argument("transform needs a nonnegative sigma");
    }
    if (a_ < sigma_.domain_lo() || a_ > sigma_.domain_hi()) {
        throw std::invalid_argument("base point outside the sigma domain");
    }
    const double h = opt_.initial_halfspan;
    build_table(a_ - h, a_ + h);
}

void LampertiTransform::build_table(double x_lo, double x_hi) {
    x_lo = std::max(x_lo, sigma_.domain_lo());
    x_hi = std::min(x_hi, sigma_.domain_hi());
    x_lo = std::min(x_lo, a_);
    x_hi = std::max(x_hi, a_);
    if (!(x_lo < x_hi)) {
        // degenerate window (domain collapsed to the base point)
        x_lo = a_ - 1e-9;
        x_hi = a_ + 1e-9;
        x_lo = std::max(x_lo, sigma_.domain_lo());
        x_hi = std::min(x_hi, sigma_.domain_hi());
        if (!(x_lo < x_hi)) throw RangeError("sigma domain too small to build a transform");
    }

    std::vector<Piece> pieces;
    for (const PieceView& v : sigma_.pieces(x_lo, x_hi)) {
        Piece p;
        p.x_lo = v.lo;
        p.x_hi = v.hi;
        p.view = v;
        const bool closed_form =
            v.kind == PieceView::Kind::constant_value ||
            (v.kind == PieceView::Kind::power_abs && v.offset == 0.0);
        if (!closed_form) {
            const int m = std::max(2, opt_.subdiv_per_piece);
            p.xs.resize(m + 1);
            p.ys.resize(m + 1);
            const double w = (v.hi - v.lo) / m;
            p.xs[0] = v.lo;
            p.ys[0] = 0.0;
            for (int k = 0; k < m; ++k) {
                p.xs[k + 1] = k + 1 == m ? v.hi : v.lo + (k + 1) * w;
                const double inc = adaptive_simpson(
                    [this](double t) { return 1.0 / sigma_(t); }, p.xs[k], p.xs[k + 1],
                    opt_.quad_tol);
                if (!(inc > 0.0) || !std::isfinite(inc)) {
                    throw NonIntegrableCoefficient(
                        0.5 * (p.xs[k] + p.xs[k + 1]),
                        "transform is not strictly increasing here");
                }
                p.ys[k + 1] = p.ys[k] + inc;
            }
        }
        pieces.push_back(std::move(p));
    }

    std::vector<double> cum(pieces.size() + 1, 0.0);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const Piece& p = pieces[i];
        double mass;
        if (!p.xs.empty()) mass = p.ys.back();
        else mass = piece_integral_impl(sigma_, p.view, p.x_lo, p.x_hi, opt_.quad_tol);
        if (!(mass > 0.0) || !std::isfinite(mass)) {
            throw NonIntegrableCoefficient(0.5 * (p.x_lo + p.x_hi),
                                           "transform is not strictly increasing here");
        }
        cum[i + 1] = cum[i] + mass;
    }

    pieces_ = std::move(pieces);
    piece_y_ = std::move(cum);
    x_lo_ = x_lo;
    x_hi_ = x_hi;

    // shift so lambda(a_) == 0 exactly in table coordinates
    const double raw_a = lambda_at(a_) ;
    for (double& y : piece_y_) y -= raw_a;
}

double LampertiTransform::piece_integral(const PieceView& v, double u, double x) const {
    return piece_integral_impl(sigma_, v, u, x, opt_.quad_tol);
}

double LampertiTransform::lambda_at(double x) const {
    if (x < x_lo_ || x > x_hi_) {
        throw RangeError("lambda query outside the covered range; grow it with ensure_x_range");
    }
    // last piece whose left edge is <= x
    std::size_t lo = 0, hi = pieces_.size();
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (pieces_[mid].x_lo <= x) lo = mid;
        else hi = mid;
    }
    const Piece& p = pieces_[lo];
    double partial;
    if (!p.xs.empty()) {
        const double w = (p.x_hi - p.x_lo) / (p.xs.size() - 1);
        auto k = std::min<std::size_t>(
            p.xs.size() - 2, static_cast<std::size_t>(std::max(0.0, (x - p.x_lo) / w)));
        partial = p.ys[k] + adaptive_simpson([this](double t) { return 1.0 / sigma_(t); },
                                             p.xs[k], std::min(x, p.x_hi), opt_.quad_tol);
    } else {
        partial = piece_integral(p.view, p.x_lo, std::min(x, p.x_hi));
    }
    return piece_y_[lo] + partial;
}

double LampertiTransform::invert_in_piece(const Piece& p, double y_base, double y) const {
    const double target = std::max(y - y_base, 0.0);

    if (p.view.kind == PieceView::Kind::constant_value) {
        return std::clamp(p.x_lo + target * p.view.value, p.x_lo, p.x_hi);
    }
    if (p.view.kind == PieceView::Kind::power_abs && p.view.offset == 0.0) {
        const double s = target + power_antideriv(p.x_lo, p.view.gamma);
        const double side = p.x_lo + p.x_hi > 0.0 ? 1.0 : -1.0;
        return std::clamp(power_antideriv_inv(s, p.view.gamma, side), p.x_lo, p.x_hi);
    }

    // generic: bracket in the local cumulative table, then refine
    auto it = std::upper_bound(p.ys.begin(), p.ys.end(), target);
    std::size_t k = it == p.ys.begin() ? 0 : (it - p.ys.begin()) - 1;
    k = std::min(k, p.ys.size() - 2);
    double a = p.xs[k], b = p.xs[k + 1];
    const double r = target - p.ys[k];
    // g(x) = int_{xs[k]}^x 1/sigma - r, increasing with g(a) <= 0
    auto g = [&](double x) {
        return adaptive_simpson([this](double t) { return 1.0 / sigma_(t); }, p.xs[k], x,
                                opt_.quad_tol, 20) -
               r;
    };
    double ga = -r, gb = g(b);
    if (gb < 0.0) return b;  // rounding at the panel edge
    double x = 0.5 * (a + b);
    for (int iter = 0; iter < 80; ++iter) {
        // secant proposal clipped into the bracket interior, else bisection
        double prop = gb != ga ? a - ga * (b - a) / (gb - ga) : 0.5 * (a + b);
        if (!(prop > a + 0.1 * (b - a) && prop < b - 0.1 * (b - a))) prop = 0.5 * (a + b);
        x = prop;
        const double gx = g(x);
        if (std::abs(gx) <= std::max(opt_.tol, 1e-15 * std::max(1.0, std::abs(y)))) break;
        if (gx < 0.0) {
            a = x;
            ga = gx;
        } else {
            b = x;
            gb = gx;
        }
        if (b - a <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

double LampertiTransform::inverse(double y) const {
    if (pieces_.empty()) throw RangeError("transform table is empty");
    if (y < piece_y_.front() || y > piece_y_.back()) {
        throw RangeError("inverse query outside the covered range; grow it with ensure_range");
    }
    // last boundary value <= y
    std::size_t lo = 0, hi = piece_y_.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (piece_y_[mid] <= y) lo = mid;
        else hi = mid;
    }
    return invert_in_piece(pieces_[lo], piece_y_[lo], std::min(y, piece_y_[lo + 1]));
}

std::pair<double, double> LampertiTransform::covered_y() const {
    return {piece_y_.front(), piece_y_.back()};
}

std::pair<double, double> LampertiTransform::covered_x() const { return {x_lo_, x_hi_}; }

void LampertiTransform::ensure_range(double y_lo, double y_hi) {
    if (!(y_lo <= y_hi)) throw std::invalid_argument("ensure_range interval reversed");
    for (;;) {
        const auto [lo, hi] = covered_y();
        const bool need_left = y_lo < lo;
        const bool need_right = y_hi > hi;
        if (!need_left && !need_right) return;
        const double span = std::max(x_hi_ - x_lo_, 1.0);
        double nlo = need_left ? x_lo_ - span : x_lo_;
        double nhi = need_right ? x_hi_ + span : x_hi_;
        nlo = std::max(nlo, -opt_.max_abscissa);
        nhi = std::min(nhi, opt_.max_abscissa);
        nlo = std::max(nlo, sigma_.domain_lo());
        nhi = std::min(nhi, sigma_.domain_hi());
        if (nlo == x_lo_ && nhi == x_hi_) {
            throw RangeError(
                "requested transform values are unreachable: table extension capped at the "
                "domain edge or the abscissa limit");
        }
        build_table(nlo, nhi);
    }
}

void LampertiTransform::ensure_x_range(double want_lo, double want_hi) {
    if (!(want_lo <= want_hi)) throw std::invalid_argument("ensure_x_range interval reversed");
    if (want_lo < sigma_.domain_lo() || want_hi > sigma_.domain_hi()) {
        throw RangeError("requested x-range leaves the sigma domain");
    }
    if (want_lo >= x_lo_ && want_hi <= x_hi_) return;
    build_table(std::min(want_lo, x_lo_), std::max(want_hi, x_hi_));
}

SolveResult solve(const BVFunction& sigma, const GridPath& Y, double X0, SolveOptions opt) {
    validate(Y);
    if (!std::isfinite(X0)) throw std::invalid_argument("initial value must be finite");
    if (sigma.lower_bound() < 0.0) {
        throw std::invalid_argument("solve needs sigma >= 0 everywhere");
    }

    double a;
    if (opt.base_point) {
        a = *opt.base_point;
    } else {
        // default base: X0 when 1/sigma is integrable across it, otherwise 0
        const double d = 1e-3 * std::max(1.0, std::abs(X0));
        const double plo = std::max(X0 - d, sigma.domain_lo());
        const double phi = std::min(X0 + d, sigma.domain_hi());
        try {
            (void)lambda(sigma, plo, phi);
            a = X0;
        } catch (const NonIntegrableCoefficient&) {
            a = 0.0;
        }
    }

    TransformOptions topt = opt.transform;
    topt.tol = opt.tol;
    LampertiTransform L(sigma, a, topt);

    L.ensure_x_range(std::min(X0, a), std::max(X0, a));
    const double z0 = L.lambda_at(X0);

    const std::size_t nodes = Y.grid.nodes();
    std::vector<double> z(nodes);
    double zmin = kInf, zmax = -kInf;
    std::size_t argmin = 0, argmax = 0;
    for (std::size_t k = 0; k < nodes; ++k) {
        z[k] = z0 + (Y.values[k] - Y.values[0]);
        if (z[k] < zmin) { zmin = z[k]; argmin = k; }
        if (z[k] > zmax) { zmax = z[k]; argmax = k; }
    }
    try {
        L.ensure_range(zmin, zmax);
    } catch (const RangeError& e) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "%s (path extremes at nodes %zu and %zu, t=%.6g and t=%.6g)", e.what(),
                      argmin, argmax, Y.grid.time(argmin), Y.grid.time(argmax));
        throw RangeError(buf);
    }

    std::vector<double> x(nodes);
    parallel_for(nodes, [&](std::size_t k) { x[k] = L.inverse(z[k]); });

    SolveResult res;
    res.X = GridPath(Y.grid, std::move(x));
    double defect = 0.0;
    for (std::size_t k = 0; k < nodes; ++k) {
        defect = std::max(defect, std::abs(L.lambda_at(res.X.values[k]) - z[k]));
    }
    res.lambda_defect = defect;

    for (double eps : opt.eps_list) {
        res.tau.push_back(tau_epsilon(sigma, res.X, eps));
    }

    if (opt.with_residual) {
        const double theta =
            opt.theta ? *opt.theta : default_theta(estimate_holder_exponent(Y), opt.beta);
        res.residual = sde_residual(sigma, res.X, Y, FractionalOrder(theta));
        res.theta_used = theta;
    }
    return res;
}

TauEntry tau_epsilon(const BVFunction& sigma, const GridPath& X, double eps) {
    validate(X);
    if (!(eps > 0.0)) throw std::invalid_argument("tau threshold must be positive");
    TauEntry e;
    e.eps = eps;
    for (std::size_t k = 0; k < X.values.size(); ++k) {
        if (sigma(X.values[k]) <= eps) {
            e.time = X.grid.time(k);
            e.reached = true;
            e.first_flagged_node = k;
            return e;
        }
    }
    e.time = X.grid.T;
    e.reached = false;
    e.first_flagged_node = X.grid.n;
    return e;
}

SmoothFn smooth_transform(const MollifiedFunction& sigma_n, double a, double lo, double hi,
                          int table_points) {
    if (!(lo < hi) || !(a >= lo) || !(a <= hi)) {
        throw std::invalid_argument("smooth_transform needs lo <= a <= hi, lo < hi");
    }
    if (table_points < 16) throw std::invalid_argument("table needs at least 16 points");

    struct Table {
        double lo, hi, w;
        std::vector<double> xs, ys;
        MollifiedFunction f;
    };
    auto tab = std::make_shared<Table>(Table{lo, hi, 0.0, {}, {}, sigma_n});
    const int m = table_points;
    tab->w = (hi - lo) / m;
    tab->xs.resize(m + 1);
    tab->ys.resize(m + 1);
    for (int k = 0; k <= m; ++k) tab->xs[k] = k == m ? hi : lo + k * tab->w;
    std::vector<double> inc(m);
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t k) {
        const double u = tab->xs[k], v = tab->xs[k + 1];
        const double fu = 1.0 / tab->f(u);
        const double fm = 1.0 / tab->f(0.5 * (u + v));
        const double fv = 1.0 / tab->f(v);
        inc[k] = (v - u) / 6.0 * (fu + 4.0 * fm + fv);
    });
    tab->ys[0] = 0.0;
    for (int k = 0; k < m; ++k) tab->ys[k + 1] = tab->ys[k] + inc[k];
    // anchor at a
    const auto ka = std::min<std::size_t>(m - 1, static_cast<std::size_t>((a - lo) / tab->w));
    const double u = tab->xs[ka];
    const double fu = 1.0 / tab->f(u);
    const double fm = 1.0 / tab->f(0.5 * (u + a));
    const double fa = 1.0 / tab->f(a);
    const double base = tab->ys[ka] + (a - u) / 6.0 * (fu + 4.0 * fm + fa);
    for (auto& y : tab->ys) y -= base;

    SmoothFn F;
    F.value = [tab](double x) {
        if (x < tab->lo || x > tab->hi) {
            throw std::domain_error("smooth transform queried outside its table");
        }
        const auto k = std::min<std::size_t>(tab->xs.size() - 2,
                                             static_cast<std::size_t>(
                                                 std::max(0.0, (x - tab->lo) / tab->w)));
        const double u = tab->xs[k];
        const double fu = 1.0 / tab->f(u);
        const double fm = 1.0 / tab->f(0.5 * (u + x));
        const double fx = 1.0 / tab->f(x);
        return tab->ys[k] + (x - u) / 6.0 * (fu + 4.0 * fm + fx);
    };
    F.deriv = [tab](double x) { return 1.0 / tab->f(x); };
    return F;
}

namespace {

std::vector<std::size_t> probe_nodes(const Grid& grid) {
    std::vector<std::size_t> ks;
    for (int j = 1; j <= 4; ++j) {
        auto k = static_cast<std::size_t>(
            std::llround(static_cast<double>(j) * static_cast<double>(grid.n) / 4.0));
        k = std::min(k, grid.n);
        if (k == 0) k = 1;
        if (ks.empty() || ks.back() != k) ks.push_back(k);
    }
    return ks;
}

}  // namespace

double ito_residual(const SmoothFn& F, const GridPath& X, FractionalOrder order) {
    validate(X);
    std::vector<double> dv(X.values.size());
    for (std::size_t k = 0; k < dv.size(); ++k) dv[k] = F.deriv(X.values[k]);
    GridPath R(X.grid, std::move(dv));
    PairingContext ctx(X, order);
    double sup = 0.0;
    const double F0 = F.value(X.values[0]);
    for (std::size_t k : probe_nodes(X.grid)) {
        const double t = X.grid.time(k);
        const double integral = ctx.integrate_to(R, t).value;
        sup = std::max(sup, std::abs(F.value(X.values[k]) - F0 - integral));
    }
    return sup;
}

double sde_residual(const BVFunction& sigma, const GridPath& X, const GridPath& Y,
                    FractionalOrder order) {
    validate(X);
    validate(Y);
    if (X.grid.n != Y.grid.n || X.grid.T != Y.grid.T) {
        throw std::invalid_argument("solution and driver must share one grid");
    }
    std::vector<double> sv(X.values.size());
    for (std::size_t k = 0; k < sv.size(); ++k) sv[k] = sigma(X.values[k]);
    GridPath R(X.grid, std::move(sv));
    PairingContext ctx(Y, order);
    double sup = 0.0;
    for (std::size_t k : probe_nodes(X.grid)) {
        const double t = X.grid.time(k);
        const double integral = ctx.integrate_to(R, t).value;
        sup = std::max(sup, std::abs(X.values[k] - X.values[0] - integral));
    }
    return sup;
}

}  // namespace roughsde
