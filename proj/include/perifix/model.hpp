#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "perifix/expr.hpp"
#include "perifix/integrate.hpp"
#include "perifix/order.hpp"

namespace perifix {

// Closed-loop system dx/dt = f(t, x, u) with feedback u = h(x), tau-periodic in t.
// f_i may use t, x1..xn, u1..um (and u when m == 1); h_j may use x1..xn.
class ClosedLoopModel {
public:
    ClosedLoopModel(double tau, OrthantCone state_cone, OrthantCone input_cone, std::vector<Expr> f,
                    std::vector<Expr> h, OrderInterval state_box);

    std::size_t n() const noexcept { return f_.size(); }
    std::size_t m() const noexcept { return h_.size(); }
    double period() const noexcept { return tau_; }
    const OrthantCone& state_cone() const noexcept { return k_; }
    const OrthantCone& input_cone() const noexcept { return u_cone_; }
    const OrderInterval& state_box() const noexcept { return box_; }
    const std::vector<Expr>& f_exprs() const noexcept { return f_; }
    const std::vector<Expr>& h_exprs() const noexcept { return h_; }

    // rtol 1e-9, atol 1e-12, max_step tau/100.
    IntegratorSettings default_settings() const;

    // u = h(x)
    void output(std::span<const double> x, std::span<double> u) const;
    // f(t, x, u)
    void open_loop(double t, std::span<const double> x, std::span<const double> u, std::span<double> dx) const;
    // F(t, x) = f(t, x, h(x))
    void closed_loop(double t, std::span<const double> x, std::span<double> dx) const;
    Vec closed_loop(double t, std::span<const double> x) const;

    // Integrator view of F. The model must outlive the returned callable.
    Field field() const;

private:
    double tau_;
    OrthantCone k_;
    OrthantCone u_cone_;
    std::vector<Expr> f_;
    std::vector<Expr> h_;
    OrderInterval box_;
    std::vector<CompiledExpr> f_compiled_;
    std::vector<CompiledExpr> h_compiled_;
};

// F(t, x) for the given model.
Vec eval_closed_loop_field(const ClosedLoopModel& mdl, double t, std::span<const double> x);

// Throws ModelError when sup |F(t,x) - F(t+tau,x)| exceeds 1e-10 * max(1, |F|)
// at any of `samples` quasi-random points of [0,tau] x X.
void check_periodicity(const ClosedLoopModel& mdl, int samples = 32, std::uint64_t seed = 0);

// Symmetric doubled system on R^{2n}:
//   x' = f(t, x, h(y)),  y' = f(t, y, h(x)),
// monotone for C = K x (-K) under the quasimonotone / input-increasing /
// output-decreasing assumptions.
class DoubledModel {
public:
    explicit DoubledModel(ClosedLoopModel base);

    const ClosedLoopModel& base() const noexcept { return base_; }
    std::size_t dim() const noexcept { return 2 * base_.n(); }
    const OrthantCone& cone() const noexcept { return cone_; }
    // I = [(lo, hi), (hi, lo)]_C
    const OrderInterval& box() const noexcept { return box_; }

    void eval(double t, std::span<const double> z, std::span<double> dz) const;
    Vec eval(double t, std::span<const double> z) const;
    Field field() const;

private:
    ClosedLoopModel base_;
    OrthantCone cone_;
    OrderInterval box_;
};

DoubledModel build_doubled(const ClosedLoopModel& mdl);

struct FeedbackSignature {
    // Sign of dF_i/dx_{i-1 mod n}: +1, -1, or 0 when not sign-constant.
    std::vector<int> deltas;
    // Product of deltas; 0 when any delta is indeterminate.
    int delta_product = 0;
};

// Requires n >= 2 and cyclic coupling (F_i depends only on x_i and x_{i-1}),
// otherwise throws StructureError.
FeedbackSignature classify_cyclic(const ClosedLoopModel& mdl, int samples, std::uint64_t seed = 0);

}  // namespace perifix
