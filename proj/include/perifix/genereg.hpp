#pragma once

#include <cstddef>

#include "perifix/check.hpp"
#include "perifix/expr.hpp"
#include "perifix/model.hpp"
#include "perifix/order.hpp"

namespace perifix {

// Periodically forced cyclic gene regulatory model
//   x1' = g(x_n) - a1 x1
//   xi' = x_{i-1} - ai xi,       2 <= i <= n-1
//   xn' = x_{n-1} - an(t) xn
// with a1..a_{n-1} positive constants, an(t) positive and tau-periodic,
// g(0) > 0 and g nonincreasing.
struct GeneSpec {
    std::vector<Expr> alphas;  // alphas[i] uses no variables for i < n-1; the last may use t
    Expr g;                    // in u
    double tau = 0.0;

    std::size_t n() const noexcept { return alphas.size(); }
};

// n = 3, a = (2, 1, 2 - (4/5) sin(2 pi t / 5)), g(u) = 2 / (1 + u), tau = 5.
GeneSpec reference_gene_spec();

// Throws ModelError (with the failing sample) when the spec is not admissible.
void validate_gene_spec(const GeneSpec& spec);

// min over [0, tau] of a t-expression: 10^4-point grid, then golden-section
// refinement around the best grid point.
double periodic_minimum(const Expr& e, double tau, std::size_t grid = 10000);

// Product of the alphas with the last replaced by its minimum over a period.
double alpha_product(const GeneSpec& spec);

// X = [0, g(0) (1/a1, 1/(a1 a2), ..., 1/(a1 ... an_min))].
OrderInterval compute_box_X(const GeneSpec& spec);

// Closed-loop form: f1 = u - a1 x1, fi = x_{i-1} - ai xi, h = g(x_n), m = 1,
// K = R^n_+, state box compute_box_X(spec) unless `box` is given.
ClosedLoopModel build_gene_model(const GeneSpec& spec);
ClosedLoopModel build_gene_model(const GeneSpec& spec, const OrderInterval& box);

// Uniqueness condition: max{-g'(u) : 0 <= u <= g(0)/alpha} < alpha.
// Grid of `grid_points` plus golden-section refinement; the margin
// alpha - max(-g') is reported in worst_margin (strict: pass iff > 0).
CheckResult check_H(const GeneSpec& spec, std::size_t grid_points = 2001);

}  // namespace perifix
