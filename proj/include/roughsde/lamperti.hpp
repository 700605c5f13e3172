#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "roughsde/bv_function.hpp"
#include "roughsde/grid_path.hpp"
#include "roughsde/zaehle.hpp"

namespace roughsde {

// Antiderivative of 1/sigma from a to x. Constant and pure-power pieces in
// closed form, everything else by adaptive Simpson split at breakpoints.
// Throws NonIntegrableCoefficient when 1/sigma is not integrable on [a, x]
// (e.g. sigma == 0 on a stretch, or a power zero with exponent >= 1).
double lambda(const BVFunction& sigma, double a, double x);

struct TransformOptions {
    double tol = 1e-10;        // inverse accuracy target
    double quad_tol = 1e-12;   // adaptive-quadrature tolerance per piece
    int subdiv_per_piece = 1024;  // generic-piece table density
    double initial_halfspan = 4.0;
    double max_abscissa = 1e12;  // extension cap; beyond it inverse() throws RangeError
};

// Increasing map x -> lambda(sigma, a, x) with an invertible table.
// inverse() is const and thread-safe; ensure_range() (non-const) must cover
// the needed y-window first. The table extends by span doubling up to
// max_abscissa.
class LampertiTransform {
public:
    LampertiTransform(BVFunction sigma, double a, TransformOptions opt = {});

    double operator()(double x) const { return lambda_at(x); }
    double lambda_at(double x) const;
    double inverse(double y) const;
    void ensure_range(double y_lo, double y_hi);
    void ensure_x_range(double x_lo, double x_hi);

    double base_point() const { return a_; }
    double tol() const { return opt_.tol; }
    std::pair<double, double> covered_y() const;
    std::pair<double, double> covered_x() const;
    const BVFunction& sigma() const { return sigma_; }

private:
    struct Piece {
        double x_lo, x_hi;    // may be +-inf conceptually; table keeps finite window
        PieceView view;
        // generic pieces carry a local cumulative table on [x_lo, x_hi]
        std::vector<double> xs, ys;
    };

    void build_table(double x_lo, double x_hi);
    double piece_integral(const PieceView& v, double u, double x) const;
    double invert_in_piece(const Piece& p, double y_base, double y) const;

    BVFunction sigma_;
    double a_;
    TransformOptions opt_;
    std::vector<Piece> pieces_;
    std::vector<double> piece_y_;  // lambda at piece left edges; same length as pieces_ + 1
    double x_lo_ = 0.0, x_hi_ = 0.0;
};

struct TauEntry {
    double eps = 0.0;
    double time = 0.0;   // first time sigma(X) drops below eps (T if never)
    bool reached = false;
    // first grid node at/after the crossing; uniqueness of the solution is
    // not guaranteed from this node on.
    std::size_t first_flagged_node = 0;
};

struct SolveOptions {
    std::optional<double> base_point;  // default: X0 if 1/sigma integrable there, else 0
    double tol = 1e-10;
    std::vector<double> eps_list;
    bool with_residual = false;        // costs several O(n^2) pairings
    std::optional<double> theta;       // pairing order for the residual
    double beta = 0.3;                 // admissibility margin for default_theta
    TransformOptions transform;
};

struct SolveResult {
    GridPath X;
    std::vector<TauEntry> tau;
    // sup over nodes of |lambda(X_k) - (lambda(X0) + Y_k - Y_0)|; this is the
    // defining identity of the solution, checked after the fact.
    double lambda_defect = 0.0;
    std::optional<double> residual;  // sup over probe times of the SDE defect
    double theta_used = 0.0;         // set when residual computed
};

// Pathwise solution of dX = sigma(X) dY, X_0 = X0 (deterministic initial
// value only), via X_t = Lambda^{-1}(Lambda(X0) + Y_t - Y_0).
SolveResult solve(const BVFunction& sigma, const GridPath& Y, double X0,
                  SolveOptions opt = {});

// First grid node at which sigma(X) <= eps; resolved at grid resolution only
// (no sub-mesh search), so the reported time is a node time.
TauEntry tau_epsilon(const BVFunction& sigma, const GridPath& X, double eps);

// A C^1 function given by value and derivative callables.
struct SmoothFn {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
};

// F(x) = int_a^x dy / sigma_n(y) with derivative 1/sigma_n, tabulated on
// [lo, hi] by cumulative Simpson (panel-local refinement on evaluation).
SmoothFn smooth_transform(const MollifiedFunction& sigma_n, double a,
                          double lo, double hi, int table_points = 8192);

// sup over probe times t in {T/4, T/2, 3T/4, T} of
//   |F(X_t) - F(X_0) - int_0^t F'(X) dX|.
double ito_residual(const SmoothFn& F, const GridPath& X, FractionalOrder order);

// sup over the same probe times of |X_t - X_0 - int_0^t sigma(X) dY|.
double sde_residual(const BVFunction& sigma, const GridPath& X,
                    const GridPath& Y, FractionalOrder order);

}  // namespace roughsde
