#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include "perifix/integrate.hpp"
#include "perifix/model.hpp"

namespace perifix {

// Serial runs every kernel in index order on the calling thread and is the
// reference the OpenMP path is tested against. Both produce identical
// results because each index is computed independently.
enum class Execution { Serial, Parallel };

int max_threads();
// n <= 0 leaves the OpenMP default in place.
void set_threads(int n);

// Calls fn(i) for i in [0, count). In parallel mode the exception thrown by
// the lowest failing index is rethrown after all workers finish.
template <class Fn>
void for_each_index(std::size_t count, Execution exec, Fn&& fn) {
    if (exec == Execution::Serial || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
    std::size_t error_index = count;
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(perifix_for_each_index)
            {
                if (static_cast<std::size_t>(i) < error_index) {
                    error_index = static_cast<std::size_t>(i);
                    error = std::current_exception();
                }
            }
        }
    }
    if (error) std::rethrow_exception(error);
}

// T(x) for every x.
std::vector<Vec> poincare_batch(const ClosedLoopModel& mdl, const std::vector<Vec>& xs, const IntegratorSettings& s,
                                Execution exec = Execution::Parallel);

// T~(z) for every z.
std::vector<Vec> doubled_map_batch(const DoubledModel& dm, const std::vector<Vec>& zs, const IntegratorSettings& s,
                                   Execution exec = Execution::Parallel);

// One sampled trajectory per initial state, all on the same grid.
std::vector<Trajectory> trajectory_batch(const Field& field, double t0, const std::vector<Vec>& x0s,
                                         std::span<const double> grid, const IntegratorSettings& s,
                                         Execution exec = Execution::Parallel);

}  // namespace perifix
