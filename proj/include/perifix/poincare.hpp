#pragma once

#include <span>
#include <vector>

#include "perifix/integrate.hpp"
#include "perifix/model.hpp"

namespace perifix {

// Iterates x, Tx, T^2x, ... of the period map.
struct Orbit {
    std::vector<Vec> points;
    Vec residuals;  // |T^{k+1}x - T^k x|_inf
    IntegratorStats stats;

    // Diameter (sup norm) of the last max(5, n/10) iterates.
    double tail_diameter() const;
};

// T(x) = psi(tau, 0, x). Warns (does not throw) when x is outside the state box.
Vec poincare_map(const ClosedLoopModel& mdl, std::span<const double> x, const IntegratorSettings& s);

// Period map of the doubled system.
Vec doubled_map(const DoubledModel& dm, std::span<const double> z, const IntegratorSettings& s);

// T^k x for k = 0..n from one continuous integration over [0, n tau].
Orbit iterate_orbit(const ClosedLoopModel& mdl, std::span<const double> x, int n, const IntegratorSettings& s);

// r(t) = psi(t, 0, r) on a uniform grid of samples_per_period intervals over
// [0, tau]. Throws NumericalError when |r(tau) - r| > 10 * max(residual_bound,
// atol + rtol |r|).
Trajectory periodic_solution(const ClosedLoopModel& mdl, std::span<const double> r, int samples_per_period,
                             double residual_bound, const IntegratorSettings& s);

}  // namespace perifix
