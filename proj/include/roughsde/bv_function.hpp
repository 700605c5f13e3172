#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace roughsde {

// Atom of the derivative measure: f jumps by `size` at `location`.
struct Jump {
    double location;
    double size;
    double left;   // f(location-)
    double right;  // f(location)
};

// Classification of the function restricted to one interval between
// breakpoints. Drives closed-form vs quadrature choices downstream.
struct PieceView {
    enum class Kind { constant_value, power_abs, generic };
    double lo;
    double hi;
    Kind kind;
    double value = 0.0;   // constant_value: f == value on (lo, hi)
    double gamma = 1.0;   // power_abs: f(x) == offset + |x|^gamma
    double offset = 0.0;
};

class BVFunction;

// Nondecreasing components of the Jordan decomposition, as callables:
// plus(x) - minus(x) == f(x), minus(anchor) == 0, plus(anchor) == f(anchor).
class JordanPair {
public:
    double plus(double x) const;
    double minus(double x) const;
    double anchor() const { return anchor_; }

private:
    friend class BVFunction;
    JordanPair(std::shared_ptr<const BVFunction> f, double anchor)
        : f_(std::move(f)), anchor_(anchor) {}

    std::shared_ptr<const BVFunction> f_;
    double anchor_;
};

// Right-continuous function of locally bounded variation, represented as a
// continuous piecewise-monotone part (segments with closed-form tags where
// possible) + finitely many jumps + an optional singular (Cantor) part.
class BVFunction {
public:
    struct Segment {
        enum class Kind { constant, power_abs, generic };
        double lo;  // segment covers [lo, hi); last segment also owns hi
        double hi;
        Kind kind;
        double c = 0.0;                      // constant value / additive offset
        double gamma = 1.0;                  // power_abs: c + |x|^gamma
        std::function<double(double)> fn;    // generic: continuous monotone on [lo, hi]
        bool nondecreasing = true;
    };

    // sigma(x) = beta_minus + base for x < at, beta_plus + base for x >= at.
    // beta_plus, beta_minus > 0, base >= 0.
    static BVFunction step(double beta_plus, double beta_minus, double at = 0.0,
                           double base = 0.0);

    // sigma(x) = |x|^gamma, gamma in (0, 1).
    static BVFunction power(double gamma);

    // sigma(x) = eps0 + c(x) with c the Cantor function extended by 0 left of
    // 0 and 1 right of 1; eps0 > 0. depth bounds the digit recursion
    // (value error <= 2^-depth).
    static BVFunction cantor(double eps0, int depth = 30);

    static BVFunction constant(double c);

    // Segments must tile [lo, hi] contiguously with the continuous part
    // matching at interior boundaries; jumps are (location, size) strictly
    // inside (lo, hi). Throws std::invalid_argument on violations.
    static BVFunction from_segments(std::vector<Segment> smooth,
                                    std::vector<std::pair<double, double>> jumps,
                                    double lo, double hi);

    BVFunction() = default;

    double operator()(double x) const;
    double left_limit(double x) const;

    // Lebesgue-Stieltjes masses of the positive / negative / total variation
    // measure over the half-open interval (a, b]. Exact for every
    // representable function (no sampling).
    double pos_variation(double a, double b) const;
    double neg_variation(double a, double b) const;
    double variation(double a, double b) const;

    // Anchor: domain_lo when finite, else min(0, leftmost feature - 1),
    // or 0 for a featureless (constant) function.
    double anchor() const;
    JordanPair jordan() const;

    const std::vector<Jump>& jumps() const { return jumps_; }

    // Finite feature locations: jump points, interior segment boundaries,
    // singular-part bounds. Sorted, deduplicated.
    std::vector<double> breakpoints() const;

    // Partition of [lo, hi] at breakpoints with per-interval classification.
    std::vector<PieceView> pieces(double lo, double hi) const;

    double domain_lo() const { return dom_lo_; }
    double domain_hi() const { return dom_hi_; }

    // Largest provable lower bound over the whole domain (exact for the
    // presets; sampled at breakpoints +- midpoints for custom functions).
    double lower_bound() const { return lower_bound_; }

    std::string describe() const { return description_; }

private:
    struct SingularPart {
        bool present = false;
        double scale = 1.0;
        double lo = 0.0;
        double hi = 1.0;
        int depth = 30;
    };

    double smooth_value(double x) const;
    double singular_value(double x) const;
    const Segment& segment_at(double x) const;
    void finalize();  // derive jumps_ metadata, lower_bound_, validate

    std::vector<Segment> segments_;
    std::vector<Jump> jumps_;  // sorted by location
    SingularPart singular_;
    double dom_lo_ = 0.0;
    double dom_hi_ = 0.0;
    double lower_bound_ = 0.0;
    std::string description_;
};

// Parses "step:BP,BM[,AT[,BASE]]", "power:G", "cantor:E[,DEPTH]", "const:C".
// Throws std::invalid_argument on malformed input.
BVFunction parse_bv_spec(const std::string& spec);

// Midpoint rule for the bump density exp(-1/(u(1-u))) on (0,1); weights are
// normalized to sum to exactly 1 so mollified values stay convex
// combinations (the domination inequalities then hold exactly, not just up
// to quadrature error).
class Mollifier {
public:
    explicit Mollifier(int nodes = 2048);

    const std::vector<double>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    // |raw weight sum - 1| before normalization, for reporting.
    double raw_weight_defect() const { return raw_defect_; }

private:
    std::vector<double> points_;
    std::vector<double> weights_;
    double raw_defect_;
};

// sigma_n(x) = E[plus(x + xi/n)] - E[minus(x - xi/n)], xi ~ bump on (0,1).
// Lipschitz, >= sigma pointwise, and bounded by the local variation mass.
class MollifiedFunction {
public:
    MollifiedFunction(const BVFunction& f, int n, Mollifier mollifier);

    double operator()(double x) const;
    int index() const { return n_; }
    const BVFunction& base() const { return *f_; }
    const Mollifier& mollifier() const { return mollifier_; }

private:
    std::shared_ptr<const BVFunction> f_;
    JordanPair jordan_;
    Mollifier mollifier_;
    int n_;
};

MollifiedFunction mollify(const BVFunction& f, int n,
                          const Mollifier& mollifier = Mollifier());

}  // namespace roughsde
