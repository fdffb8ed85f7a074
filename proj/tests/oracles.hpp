#pragma once

// Test-only reference computations, independent of the library's integrator
// and expression engine.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using State = std::vector<double>;
using Rhs = std::function<State(double, const State&)>;

// Classical fixed-step RK4.
inline State rk4(const Rhs& f, double t0, State x, double t1, int steps) {
    const double h = (t1 - t0) / steps;
    double t = t0;
    for (int k = 0; k < steps; ++k) {
        const State k1 = f(t, x);
        State tmp(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        const State k2 = f(t + 0.5 * h, tmp);
        for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        const State k3 = f(t + 0.5 * h, tmp);
        for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + h * k3[i];
        const State k4 = f(t + h, tmp);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        t = t0 + (k + 1) * h;
    }
    return x;
}

inline double alpha3(double t) { return 2.0 - 0.8 * std::sin(0.4 * std::numbers::pi * t); }
inline double g(double u) { return 2.0 / (1.0 + u); }
inline double neg_gprime(double u) { return 2.0 / ((1.0 + u) * (1.0 + u)); }

// Hand-coded gene example field.
inline State gene_field(double t, const State& x) {
    return {g(x[2]) - 2.0 * x[0], x[0] - x[1], x[1] - alpha3(t) * x[2]};
}

inline double sup_dist(const State& a, const State& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace oracle
