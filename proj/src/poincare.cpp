#include "perifix/poincare.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "perifix/errors.hpp"
#include "perifix/log.hpp"

namespace perifix {

double Orbit::tail_diameter() const {
    if (points.empty()) return 0.0;
    const std::size_t iterates = points.size() - 1;
    const std::size_t len = std::min(points.size(), std::max<std::size_t>(5, iterates / 10));
    double d = 0;
    for (std::size_t i = points.size() - len; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) d = std::max(d, sup_distance(points[i], points[j]));
    return d;
}

Vec poincare_map(const ClosedLoopModel& mdl, std::span<const double> x, const IntegratorSettings& s) {
    if (x.size() != mdl.n()) throw DimensionError("poincare_map: dimension mismatch");
    if (!in_interval(mdl.state_box(), x)) warn("poincare_map: initial state outside the state box");
    return flow(mdl.field(), 0.0, x, mdl.period(), s).state;
}

Vec doubled_map(const DoubledModel& dm, std::span<const double> z, const IntegratorSettings& s) {
    if (z.size() != dm.dim()) throw DimensionError("doubled_map: dimension mismatch");
    return flow(dm.field(), 0.0, z, dm.base().period(), s).state;
}

Orbit iterate_orbit(const ClosedLoopModel& mdl, std::span<const double> x, int n, const IntegratorSettings& s) {
    if (n < 0) throw std::invalid_argument("iterate_orbit: n must be nonnegative");
    if (x.size() != mdl.n()) throw DimensionError("iterate_orbit: dimension mismatch");
    Orbit orbit;
    if (n == 0) {
        orbit.points.emplace_back(x.begin(), x.end());
        return orbit;
    }
    Vec grid(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) grid[static_cast<std::size_t>(k)] = k * mdl.period();
    Trajectory tr = sample_trajectory(mdl.field(), 0.0, x, grid, s);
    orbit.points = std::move(tr.states);
    orbit.stats = tr.stats;
    for (std::size_t k = 0; k + 1 < orbit.points.size(); ++k)
        orbit.residuals.push_back(sup_distance(orbit.points[k + 1], orbit.points[k]));
    return orbit;
}

Trajectory periodic_solution(const ClosedLoopModel& mdl, std::span<const double> r, int samples_per_period,
                             double residual_bound, const IntegratorSettings& s) {
    if (samples_per_period < 1) throw std::invalid_argument("periodic_solution: samples_per_period must be positive");
    if (r.size() != mdl.n()) throw DimensionError("periodic_solution: dimension mismatch");
    const Vec grid = uniform_grid(0.0, mdl.period(), mdl.period() / samples_per_period);
    Trajectory tr = sample_trajectory(mdl.field(), 0.0, r, grid, s);
    const double closure = sup_distance(tr.states.back(), r);
    // Two integrations with different step sequences cannot agree below the solver tolerance.
    const double bound = std::max(residual_bound, s.atol + s.rtol * sup_norm(r));
    if (closure > 10.0 * bound) {
        std::ostringstream msg;
        msg << "periodic solution does not close: |r(tau) - r(0)| = " << closure << " exceeds 10 x " << bound;
        throw NumericalError(msg.str());
    }
    return tr;
}

}  // namespace perifix
