#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "perifix/check.hpp"
#include "perifix/integrate.hpp"
#include "perifix/model.hpp"
#include "perifix/parallel.hpp"

namespace perifix {

inline constexpr double kJacobianSignEps = 1e-7;
inline constexpr double kBoxInvarianceEps = 1e-8;
inline constexpr double kChainEps = 1e-8;

// Box in R^m covering h(X), estimated from the corners of X (n <= 12) and
// `samples` quasi-random interior points. Oriented by the input cone.
OrderInterval estimate_input_box(const ClosedLoopModel& mdl, int samples = 256, std::uint64_t seed = 0);

// Kamke condition: s_i s_j df_i/dx_j >= 0 for i != j, u held fixed.
CheckResult check_A1_quasimonotone(const ClosedLoopModel& mdl, int samples, std::uint64_t seed,
                                   Execution exec = Execution::Parallel);
// s_i s^U_k df_i/du_k >= 0.
CheckResult check_A2_input_monotone(const ClosedLoopModel& mdl, int samples, std::uint64_t seed,
                                    Execution exec = Execution::Parallel);
// s^U_k s_j dh_k/dx_j <= 0.
CheckResult check_A3_output_decreasing(const ClosedLoopModel& mdl, int samples, std::uint64_t seed,
                                       Execution exec = Execution::Parallel);

// One period of the doubled flow from a0 = (x0, y0) must move up in the C
// order: T~(a0) - a0 >=_C 0, equivalent to the integral sign condition on
// the two blocks. Throws PreconditionError unless x0 <=_K y0.
CheckResult check_bracket_condition(const DoubledModel& dm, std::span<const double> x0, std::span<const double> y0,
                                    const IntegratorSettings& s);

// Weak inward-pointing test of F on every face of `box` at sampled times.
CheckResult verify_box_invariance(const ClosedLoopModel& mdl, const OrderInterval& box, int time_samples,
                                  int face_samples, std::uint64_t seed, Execution exec = Execution::Parallel);

enum class CertificateStatus { Converged, MaxIters, BracketViolated };

std::string_view to_string(CertificateStatus s);

struct ChainStep {
    int k = 0;
    double gap = 0.0;        // |a_k - b_k|_inf
    double margin_a = 0.0;   // order margin of a_{k-1} <=_C a_k
    double margin_ab = 0.0;  // order margin of a_k <=_C b_k
    double margin_b = 0.0;   // order margin of b_k <=_C b_{k-1}
};

struct ConvergenceCertificate {
    CertificateStatus status = CertificateStatus::MaxIters;
    Vec p;  // limit of the chain started at (x0, y0)
    Vec q;  // limit of the chain started at (y0, x0)
    double gap = 0.0;
    int iterations = 0;
    std::vector<ChainStep> chain_log;
    Vec r;  // diagonal fixed point, midpoint of p's two blocks
    double fixed_point_residual = std::numeric_limits<double>::quiet_NaN();
    double tol = 0.0;
    double residual_tol = 0.0;
    int violation_iteration = -1;
    // p = q shows uniqueness only numerically unless a sufficient condition
    // (such as H for gene models) was verified; callers may upgrade this.
    std::string uniqueness = "empirical";
};

// Monotone bracketing: iterates T~ from a0 = (x0, y0) and b0 = (y0, x0),
// checking a_k <=_C a_{k+1} <=_C b_{k+1} <=_C b_k within kChainEps. Stops
// once |a_k - b_k| < tol and |T r - r| < residual_tol, or after max_iters.
ConvergenceCertificate bracket_converge(const DoubledModel& dm, std::span<const double> x0, std::span<const double> y0,
                                        double tol, double residual_tol, int max_iters, const IntegratorSettings& s,
                                        Execution exec = Execution::Parallel);

// |phi(k tau + t_star, 0, a0) - phi(t_star, 0, p)|_inf.
double phase_defect(const DoubledModel& dm, std::span<const double> a0, std::span<const double> p, int k,
                    double t_star, const IntegratorSettings& s);

}  // namespace perifix
