#include "perifix/parallel.hpp"

#include "perifix/poincare.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace perifix {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

std::vector<Vec> poincare_batch(const ClosedLoopModel& mdl, const std::vector<Vec>& xs, const IntegratorSettings& s,
                                Execution exec) {
    std::vector<Vec> out(xs.size());
    for_each_index(xs.size(), exec, [&](std::size_t i) { out[i] = flow(mdl.field(), 0.0, xs[i], mdl.period(), s).state; });
    return out;
}

std::vector<Vec> doubled_map_batch(const DoubledModel& dm, const std::vector<Vec>& zs, const IntegratorSettings& s,
                                   Execution exec) {
    std::vector<Vec> out(zs.size());
    for_each_index(zs.size(), exec, [&](std::size_t i) { out[i] = doubled_map(dm, zs[i], s); });
    return out;
}

std::vector<Trajectory> trajectory_batch(const Field& field, double t0, const std::vector<Vec>& x0s,
                                         std::span<const double> grid, const IntegratorSettings& s, Execution exec) {
    std::vector<Trajectory> out(x0s.size());
    for_each_index(x0s.size(), exec, [&](std::size_t i) { out[i] = sample_trajectory(field, t0, x0s[i], grid, s); });
    return out;
}

}  // namespace perifix
