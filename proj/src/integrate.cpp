#include "perifix/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "perifix/errors.hpp"

namespace perifix {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between the 5th and embedded 4th order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

class DormandPrince {
public:
    DormandPrince(const Field& field, double t0, std::span<const double> x0, const IntegratorSettings& s)
        : field_(field), s_(s), t_(t0), x_(x0.begin(), x0.end()), n_(x0.size()) {
        for (double v : x_)
            if (!std::isfinite(v)) throw IntegrationError("non-finite initial state", t_, x_);
        k1_.resize(n_);
        k2_.resize(n_);
        k3_.resize(n_);
        k4_.resize(n_);
        k5_.resize(n_);
        k6_.resize(n_);
        k7_.resize(n_);
        tmp_.resize(n_);
        xnew_.resize(n_);
        eval(t_, x_, k1_);
    }

    double time() const { return t_; }
    const Vec& state() const { return x_; }
    const IntegratorStats& stats() const { return stats_; }

    void advance_to(double target) {
        if (target < t_) throw std::invalid_argument("integration target precedes current time");
        if (n_ == 0) {
            t_ = target;
            return;
        }
        if (h_ <= 0) h_ = initial_step(target);
        while (t_ < target) {
            if (stats_.steps + stats_.rejections >= s_.max_steps)
                throw IntegrationError("maximum step count exceeded at t=" + std::to_string(t_), t_, x_);
            double h = std::min(h_, s_.max_step);
            bool clipped = false;
            if (t_ + h >= target) {
                h = target - t_;
                clipped = true;
            }
            if (h <= 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_)) && !clipped)
                throw IntegrationError("step size underflow at t=" + std::to_string(t_), t_, x_);

            const double err = trial(h);
            if (err <= 1.0) {
                ++stats_.steps;
                t_ = clipped ? target : t_ + h;
                x_.swap(xnew_);
                k1_.swap(k7_);
                const double fac = err == 0.0 ? kMaxFactor : std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, kMaxFactor);
                const double proposal = h * fac;
                // A clipped step says nothing about the natural step size; keep the larger.
                h_ = clipped ? std::max(h_, proposal) : proposal;
            } else {
                ++stats_.rejections;
                h_ = h * std::max(kMinFactor, kSafety * std::pow(err, -0.2));
            }
        }
    }

private:
    void eval(double t, std::span<const double> x, std::span<double> dx) {
        field_(t, x, dx);
        ++stats_.rhs_evals;
    }

    double scale(double a, double b) const {
        return s_.atol + s_.rtol * std::max(std::abs(a), std::abs(b));
    }

    double initial_step(double target) {
        double d0 = 0, d1 = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double sc = scale(x_[i], x_[i]);
            d0 = std::max(d0, std::abs(x_[i]) / sc);
            d1 = std::max(d1, std::abs(k1_[i]) / sc);
        }
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min({h0, s_.max_step, target - t_});
        if (h0 <= 0) return std::min(s_.max_step, 1e-6);
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = x_[i] + h0 * k1_[i];
        eval(t_ + h0, tmp_, k2_);
        double d2 = 0;
        for (std::size_t i = 0; i < n_; ++i) d2 = std::max(d2, std::abs(k2_[i] - k1_[i]) / scale(x_[i], x_[i]) / h0);
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        return std::min({100 * h0, h1, s_.max_step});
    }

    // One trial step of size h; fills xnew_, k7_ and returns the scaled error norm.
    double trial(double h) {
        const double t = t_;
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = x_[i] + h * a21 * k1_[i];
        eval(t + c2 * h, tmp_, k2_);
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = x_[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
        eval(t + c3 * h, tmp_, k3_);
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = x_[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
        eval(t + c4 * h, tmp_, k4_);
        for (std::size_t i = 0; i < n_; ++i)
            tmp_[i] = x_[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
        eval(t + c5 * h, tmp_, k5_);
        for (std::size_t i = 0; i < n_; ++i)
            tmp_[i] = x_[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
        eval(t + h, tmp_, k6_);
        for (std::size_t i = 0; i < n_; ++i)
            xnew_[i] = x_[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] + b6 * k6_[i]);
        for (std::size_t i = 0; i < n_; ++i)
            if (!std::isfinite(xnew_[i]))
                throw IntegrationError("non-finite state near t=" + std::to_string(t + h) + " (blow-up)", t_, x_);
        eval(t + h, xnew_, k7_);

        double err = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double e =
                h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * k7_[i]);
            err = std::max(err, std::abs(e) / scale(x_[i], xnew_[i]));
        }
        if (!std::isfinite(err)) throw IntegrationError("non-finite error estimate near t=" + std::to_string(t), t_, x_);
        return err;
    }

    const Field& field_;
    const IntegratorSettings& s_;
    double t_;
    Vec x_;
    std::size_t n_;
    double h_ = 0;
    IntegratorStats stats_;
    Vec k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, xnew_;
};

}  // namespace

void IntegratorSettings::validate() const {
    if (!(rtol > 0) || !(atol > 0)) throw std::invalid_argument("integrator tolerances must be positive");
    if (!(max_step > 0)) throw std::invalid_argument("integrator max_step must be positive");
    if (max_steps <= 0) throw std::invalid_argument("integrator max_steps must be positive");
}

FlowResult flow(const Field& field, double t0, std::span<const double> x0, double t1, const IntegratorSettings& s) {
    s.validate();
    if (t1 < t0) throw std::invalid_argument("flow: t1 must not precede t0");
    DormandPrince dp(field, t0, x0, s);
    dp.advance_to(t1);
    return {dp.state(), dp.stats()};
}

Trajectory sample_trajectory(const Field& field, double t0, std::span<const double> x0, std::span<const double> grid,
                             const IntegratorSettings& s) {
    s.validate();
    if (grid.empty()) throw std::invalid_argument("sample_trajectory: empty grid");
    if (grid[0] < t0) throw std::invalid_argument("sample_trajectory: grid starts before t0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("sample_trajectory: grid must be strictly increasing");

    DormandPrince dp(field, t0, x0, s);
    Trajectory tr;
    tr.times.assign(grid.begin(), grid.end());
    tr.states.reserve(grid.size());
    for (double t : grid) {
        dp.advance_to(t);
        tr.states.push_back(dp.state());
    }
    tr.stats = dp.stats();
    return tr;
}

Vec uniform_grid(double t0, double t1, double dt) {
    if (!(dt > 0) || t1 < t0) throw std::invalid_argument("uniform_grid: need dt > 0 and t1 >= t0");
    const auto intervals = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
    Vec g(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k) g[k] = t0 + static_cast<double>(k) * dt;
    g.back() = t1;
    if (intervals == 0) g[0] = t0;
    return g;
}

}  // namespace perifix
