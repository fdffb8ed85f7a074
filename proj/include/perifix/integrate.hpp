#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "perifix/order.hpp"

namespace perifix {

// dx = field(t, x). Must be safe to call concurrently.
using Field = std::function<void(double t, std::span<const double> x, std::span<double> dx)>;

struct IntegratorSettings {
    double rtol = 1e-9;
    double atol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    std::int64_t max_steps = 10'000'000;

    void validate() const;
};

struct IntegratorStats {
    std::int64_t steps = 0;
    std::int64_t rejections = 0;
    std::int64_t rhs_evals = 0;

    IntegratorStats& operator+=(const IntegratorStats& o) {
        steps += o.steps;
        rejections += o.rejections;
        rhs_evals += o.rhs_evals;
        return *this;
    }
};

struct FlowResult {
    Vec state;
    IntegratorStats stats;
};

struct Trajectory {
    Vec times;
    std::vector<Vec> states;
    IntegratorStats stats;
};

// Solution of dx/dt = field(t, x) at t1 from x(t0) = x0, using the
// Dormand-Prince 5(4) pair. The last step is clipped to land on t1 exactly.
FlowResult flow(const Field& field, double t0, std::span<const double> x0, double t1, const IntegratorSettings& s);

// States at every grid time from one continuous integration. grid[0] >= t0,
// grid increasing. Steps are clipped to hit each grid point exactly.
Trajectory sample_trajectory(const Field& field, double t0, std::span<const double> x0, std::span<const double> grid,
                             const IntegratorSettings& s);

// t0, t0 + dt, ..., t1 with round((t1 - t0) / dt) intervals; the last point is t1 verbatim.
Vec uniform_grid(double t0, double t1, double dt);

}  // namespace perifix
