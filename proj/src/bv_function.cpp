#include "roughsde/bv_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace roughsde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Standard Cantor function on [0,1] by ternary digit recursion; exact on
// plateau points, error <= 2^-depth elsewhere.
double cantor01(double x, int depth) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double y = 0.0;
    double w = 1.0;
    for (int i = 0; i < depth; ++i) {
        w *= 0.5;
        x *= 3.0;
        if (x < 1.0) continue;
        if (x <= 2.0) return y + w;
        y += w;
        x -= 2.0;
    }
    return y + w * x;
}

double eval_segment(const BVFunction::Segment& s, double x) {
    switch (s.kind) {
        case BVFunction::Segment::Kind::constant: return s.c;
        case BVFunction::Segment::Kind::power_abs: return s.c + std::pow(std::abs(x), s.gamma);
        case BVFunction::Segment::Kind::generic: return s.fn(x);
    }
    return 0.0;
}

}  // namespace

double BVFunction::smooth_value(double x) const {
    return eval_segment(segment_at(x), x);
}

double BVFunction::singular_value(double x) const {
    if (!singular_.present) return 0.0;
    double u = (x - singular_.lo) / (singular_.hi - singular_.lo);
    return singular_.scale * cantor01(u, singular_.depth);
}

const BVFunction::Segment& BVFunction::segment_at(double x) const {
    if (x < dom_lo_ || x > dom_hi_) {
        throw std::domain_error("argument outside the function domain");
    }
    // last segment whose lo <= x
    std::size_t lo = 0, hi = segments_.size();
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (segments_[mid].lo <= x) lo = mid;
        else hi = mid;
    }
    return segments_[lo];
}

double BVFunction::operator()(double x) const {
    double v = smooth_value(x) + singular_value(x);
    // atoms at locations <= x
    std::size_t idx = std::upper_bound(jumps_.begin(), jumps_.end(), x,
                                       [](double t, const Jump& j) { return t < j.location; }) -
                      jumps_.begin();
    for (std::size_t i = 0; i < idx; ++i) v += jumps_[i].size;
    return v;
}

double BVFunction::left_limit(double x) const {
    double v = (*this)(x);
    for (const Jump& j : jumps_) {
        if (j.location == x) return v - j.size;
        if (j.location > x) break;
    }
    return v;
}

double BVFunction::pos_variation(double a, double b) const {
    if (!(a <= b)) throw std::invalid_argument("variation interval reversed");
    double pv = 0.0;
    for (const Segment& s : segments_) {
        double u = std::max(s.lo, a);
        double v = std::min(s.hi, b);
        if (v <= u) continue;
        double rise = eval_segment(s, v) - eval_segment(s, u);
        if (rise > 0.0) pv += rise;
    }
    for (const Jump& j : jumps_) {
        if (a < j.location && j.location <= b && j.size > 0.0) pv += j.size;
    }
    if (singular_.present) {
        pv += singular_value(std::min(b, singular_.hi)) -
              singular_value(std::clamp(a, singular_.lo, singular_.hi));
    }
    return pv;
}

double BVFunction::neg_variation(double a, double b) const {
    if (!(a <= b)) throw std::invalid_argument("variation interval reversed");
    double nv = 0.0;
    for (const Segment& s : segments_) {
        double u = std::max(s.lo, a);
        double v = std::min(s.hi, b);
        if (v <= u) continue;
        double rise = eval_segment(s, v) - eval_segment(s, u);
        if (rise < 0.0) nv -= rise;
    }
    for (const Jump& j : jumps_) {
        if (a < j.location && j.location <= b && j.size < 0.0) nv -= j.size;
    }
    return nv;
}

double BVFunction::variation(double a, double b) const {
    return pos_variation(a, b) + neg_variation(a, b);
}

double BVFunction::anchor() const {
    if (std::isfinite(dom_lo_)) return dom_lo_;
    std::vector<double> feats = breakpoints();
    if (feats.empty()) return 0.0;
    return std::min(0.0, feats.front() - 1.0);
}

JordanPair BVFunction::jordan() const {
    return JordanPair(std::make_shared<BVFunction>(*this), anchor());
}

double JordanPair::plus(double x) const {
    double base = (*f_)(anchor_);
    if (x >= anchor_) return base + f_->pos_variation(anchor_, x);
    return base - f_->pos_variation(x, anchor_);
}

double JordanPair::minus(double x) const {
    if (x >= anchor_) return f_->neg_variation(anchor_, x);
    return -f_->neg_variation(x, anchor_);
}

std::vector<double> BVFunction::breakpoints() const {
    std::vector<double> pts;
    for (const Segment& s : segments_) {
        if (std::isfinite(s.lo)) pts.push_back(s.lo);
        if (std::isfinite(s.hi)) pts.push_back(s.hi);
    }
    for (const Jump& j : jumps_) pts.push_back(j.location);
    if (singular_.present) {
        pts.push_back(singular_.lo);
        pts.push_back(singular_.hi);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

std::vector<PieceView> BVFunction::pieces(double lo, double hi) const {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("pieces() needs a finite nonempty interval");
    }
    std::vector<double> cuts{lo};
    for (double b : breakpoints()) {
        if (b > lo && b < hi) cuts.push_back(b);
    }
    cuts.push_back(hi);

    std::vector<PieceView> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double u = cuts[i], v = cuts[i + 1];
        double mid = 0.5 * (u + v);
        PieceView pv;
        pv.lo = u;
        pv.hi = v;
        double offset = 0.0;
        for (const Jump& j : jumps_) {
            if (j.location <= mid) offset += j.size;
        }
        bool singular_active = false;
        if (singular_.present) {
            if (mid > singular_.lo && mid < singular_.hi) singular_active = true;
            else if (mid >= singular_.hi) offset += singular_.scale;
        }
        const Segment& s = segment_at(mid);
        if (singular_active || s.kind == Segment::Kind::generic) {
            pv.kind = PieceView::Kind::generic;
        } else if (s.kind == Segment::Kind::constant) {
            pv.kind = PieceView::Kind::constant_value;
            pv.value = s.c + offset;
        } else {
            pv.kind = PieceView::Kind::power_abs;
            pv.gamma = s.gamma;
            pv.offset = s.c + offset;
        }
        out.push_back(pv);
    }
    return out;
}

void BVFunction::finalize() {
    if (segments_.empty()) throw std::invalid_argument("need at least one segment");
    std::sort(segments_.begin(), segments_.end(),
              [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
    dom_lo_ = segments_.front().lo;
    dom_hi_ = segments_.back().hi;
    for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
        double gap = segments_[i + 1].lo - segments_[i].hi;
        if (std::abs(gap) > 1e-12 * std::max(1.0, std::abs(segments_[i].hi))) {
            throw std::invalid_argument("segments do not tile the domain");
        }
        segments_[i + 1].lo = segments_[i].hi;
        double a = eval_segment(segments_[i], segments_[i].hi);
        double b = eval_segment(segments_[i + 1], segments_[i + 1].lo);
        if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a))) {
            throw std::invalid_argument(
                "smooth part discontinuous at a segment boundary; model it as a jump");
        }
    }

    std::sort(jumps_.begin(), jumps_.end(),
              [](const Jump& a, const Jump& b) { return a.location < b.location; });
    for (std::size_t i = 0; i + 1 < jumps_.size(); ++i) {
        if (jumps_[i].location == jumps_[i + 1].location) {
            throw std::invalid_argument("duplicate jump location");
        }
    }
    for (Jump& j : jumps_) {
        if (!std::isfinite(j.location) || !std::isfinite(j.size)) {
            throw std::invalid_argument("jump data must be finite");
        }
        if (j.location <= dom_lo_ || j.location >= dom_hi_) {
            throw std::invalid_argument("jump location must be interior to the domain");
        }
        j.left = left_limit(j.location);  // uses sizes only, safe mid-build
        j.right = j.left + j.size;
    }

    // minimum of the function over the domain: segments are monotone and the
    // jump/singular offsets are constant between breakpoints, so endpoint
    // samples of every piece cover all candidates.
    double m = kInf;
    std::vector<double> probes = breakpoints();
    if (std::isfinite(dom_lo_)) probes.push_back(dom_lo_);
    if (std::isfinite(dom_hi_)) probes.push_back(dom_hi_);
    if (probes.empty()) probes.push_back(0.0);
    for (double x : probes) {
        m = std::min(m, (*this)(x));
        m = std::min(m, left_limit(x));
    }
    for (const Segment& s : segments_) {
        if (!std::isfinite(s.lo) && s.kind == Segment::Kind::constant) m = std::min(m, s.c);
        if (!std::isfinite(s.hi) && s.kind == Segment::Kind::constant) m = std::min(m, s.c);
        if (s.kind == Segment::Kind::generic &&
            (!std::isfinite(s.lo) || !std::isfinite(s.hi))) {
            throw std::invalid_argument("generic segments need finite bounds");
        }
    }
    lower_bound_ = m;
}

BVFunction BVFunction::step(double beta_plus, double beta_minus, double at, double base) {
    if (!(beta_plus > 0.0) || !(beta_minus > 0.0) || !(base >= 0.0)) {
        throw std::invalid_argument("step needs beta_plus, beta_minus > 0 and base >= 0");
    }
    BVFunction f;
    Segment s;
    s.lo = -kInf;
    s.hi = kInf;
    s.kind = Segment::Kind::constant;
    s.c = beta_minus + base;
    f.segments_.push_back(s);
    if (beta_plus != beta_minus) {
        f.jumps_.push_back(Jump{at, beta_plus - beta_minus, 0.0, 0.0});
    }
    f.finalize();
    char buf[128];
    std::snprintf(buf, sizeof buf, "step(beta_plus=%g, beta_minus=%g, at=%g, base=%g)",
                  beta_plus, beta_minus, at, base);
    f.description_ = buf;
    return f;
}

BVFunction BVFunction::power(double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("power exponent must lie in (0,1)");
    }
    BVFunction f;
    Segment left;
    left.lo = -kInf;
    left.hi = 0.0;
    left.kind = Segment::Kind::power_abs;
    left.gamma = gamma;
    left.nondecreasing = false;
    Segment right = left;
    right.lo = 0.0;
    right.hi = kInf;
    right.nondecreasing = true;
    f.segments_ = {left, right};
    f.finalize();
    char buf[64];
    std::snprintf(buf, sizeof buf, "power(gamma=%g)", gamma);
    f.description_ = buf;
    return f;
}

BVFunction BVFunction::cantor(double eps0, int depth) {
    if (!(eps0 > 0.0)) throw std::invalid_argument("cantor floor must be positive");
    if (depth < 1 || depth > 60) throw std::invalid_argument("cantor depth must be in [1,60]");
    BVFunction f;
    Segment s;
    s.lo = -kInf;
    s.hi = kInf;
    s.kind = Segment::Kind::constant;
    s.c = eps0;
    f.segments_.push_back(s);
    f.singular_ = SingularPart{true, 1.0, 0.0, 1.0, depth};
    f.finalize();
    char buf[64];
    std::snprintf(buf, sizeof buf, "cantor(eps0=%g, depth=%d)", eps0, depth);
    f.description_ = buf;
    return f;
}

BVFunction BVFunction::constant(double c) {
    if (!std::isfinite(c)) throw std::invalid_argument("constant must be finite");
    BVFunction f;
    Segment s;
    s.lo = -kInf;
    s.hi = kInf;
    s.kind = Segment::Kind::constant;
    s.c = c;
    f.segments_.push_back(s);
    f.finalize();
    char buf[64];
    std::snprintf(buf, sizeof buf, "const(%g)", c);
    f.description_ = buf;
    return f;
}

BVFunction BVFunction::from_segments(std::vector<Segment> smooth,
                                     std::vector<std::pair<double, double>> jumps,
                                     double lo, double hi) {
    BVFunction f;
    f.segments_ = std::move(smooth);
    if (f.segments_.empty() || f.segments_.front().lo != lo || f.segments_.back().hi != hi) {
        throw std::invalid_argument("segments must span [lo, hi]");
    }
    for (auto [loc, size] : jumps) f.jumps_.push_back(Jump{loc, size, 0.0, 0.0});
    f.finalize();
    f.description_ = "custom";
    return f;
}

BVFunction parse_bv_spec(const std::string& spec) {
    auto colon = spec.find(':');
    std::string name = spec.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::string rest = spec.substr(colon + 1);
        std::size_t pos = 0;
        while (pos < rest.size()) {
            std::size_t used = 0;
            args.push_back(std::stod(rest.substr(pos), &used));
            pos += used;
            if (pos < rest.size()) {
                if (rest[pos] != ',') throw std::invalid_argument("malformed sigma spec: " + spec);
                ++pos;
            }
        }
    }
    auto want = [&](std::size_t lo_n, std::size_t hi_n) {
        if (args.size() < lo_n || args.size() > hi_n) {
            throw std::invalid_argument("wrong argument count in sigma spec: " + spec);
        }
    };
    if (name == "step") {
        want(2, 4);
        double at = args.size() > 2 ? args[2] : 0.0;
        double base = args.size() > 3 ? args[3] : 0.0;
        return BVFunction::step(args[0], args[1], at, base);
    }
    if (name == "power") {
        want(1, 1);
        return BVFunction::power(args[0]);
    }
    if (name == "cantor") {
        want(1, 2);
        int depth = args.size() > 1 ? static_cast<int>(args[1]) : 30;
        return BVFunction::cantor(args[0], depth);
    }
    if (name == "const") {
        want(1, 1);
        return BVFunction::constant(args[0]);
    }
    throw std::invalid_argument("unknown sigma spec: " + spec);
}

Mollifier::Mollifier(int nodes) {
    if (nodes < 8) throw std::invalid_argument("mollifier needs at least 8 nodes");
    auto raw_sum = [](int m) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) {
            double u = (i + 0.5) / m;
            s += std::exp(-1.0 / (u * (1.0 - u))) / m;
        }
        return s;
    };
    points_.resize(nodes);
    weights_.resize(nodes);
    double total = 0.0;
    for (int i = 0; i < nodes; ++i) {
        double u = (i + 0.5) / nodes;
        points_[i] = u;
        weights_[i] = std::exp(-1.0 / (u * (1.0 - u)));
        total += weights_[i];
    }
    for (double& w : weights_) w /= total;
    // quadrature-error report: midpoint estimate vs its own refinement
    double s1 = raw_sum(nodes), s2 = raw_sum(2 * nodes);
    raw_defect_ = std::abs(s1 - s2) / s2;
}

MollifiedFunction::MollifiedFunction(const BVFunction& f, int n, Mollifier mollifier)
    : f_(std::make_shared<BVFunction>(f)),
      jordan_(f_->jordan()),
      mollifier_(std::move(mollifier)),
      n_(n) {
    if (n < 1) throw std::invalid_argument("mollification index must be >= 1");
}

double MollifiedFunction::operator()(double x) const {
    const auto& u = mollifier_.points();
    const auto& w = mollifier_.weights();
    double inv_n = 1.0 / static_cast<double>(n_);
    double acc_plus = 0.0, acc_minus = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        acc_plus += w[i] * jordan_.plus(x + u[i] * inv_n);
        acc_minus += w[i] * jordan_.minus(x - u[i] * inv_n);
    }
    return acc_plus - acc_minus;
}

MollifiedFunction mollify(const BVFunction& f, int n, const Mollifier& mollifier) {
    return MollifiedFunction(f, n, mollifier);
}

}  // namespace roughsde
