#include "perifix/certify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "perifix/errors.hpp"
#include "perifix/poincare.hpp"
#include "perifix/sampling.hpp"

namespace perifix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Sample {
    double t = 0.0;
    Vec x;
    Vec u;
};

double fd_step(double v) {
    double h = std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(v));
    volatile double vh = v + h;
    return vh - v;
}

// d/dv[j] of fn(v) (vector valued), central differences.
void fd_column(const std::function<void(std::span<const double>, std::span<double>)>& fn, Vec v, std::size_t j,
               std::span<double> out) {
    const double vj = v[j];
    const double h = fd_step(vj);
    Vec plus(out.size()), minus(out.size());
    v[j] = vj + h;
    fn(v, plus);
    v[j] = vj - h;
    fn(v, minus);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (plus[i] - minus[i]) / (2 * h);
}

std::string entry_label(const char* num, std::size_t i, const char* den, std::size_t j) {
    return std::string("d") + num + std::to_string(i + 1) + "/d" + den + std::to_string(j + 1);
}

struct EntrySet {
    std::vector<std::string> labels;
    // Fills one value per label for the sample; values are sign adjusted (>= 0 is good).
    std::function<void(const Sample&, std::span<double>)> eval;
};

// Shared reduction for sampled sign checks. Entries that never exceed eps in
// magnitude are structural zeros and do not set the reported margin.
CheckResult sampled_sign_check(std::string name, const std::vector<Sample>& samples, const EntrySet& entries,
                               std::uint64_t seed, Execution exec) {
    CheckResult res;
    res.name = std::move(name);
    res.eps = kJacobianSignEps;
    res.seed = seed;
    res.samples_used = static_cast<std::int64_t>(samples.size());

    const std::size_t ne = entries.labels.size();
    std::vector<Vec> values(samples.size(), Vec(ne));
    std::vector<std::optional<std::string>> errors(samples.size());
    for_each_index(samples.size(), exec, [&](std::size_t k) {
        try {
            entries.eval(samples[k], values[k]);
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    });

    WitnessSet witnesses;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (errors[k]) {
            res.verdict = Verdict::Indeterminate;
            res.message = "evaluation failed: " + *errors[k];
            res.worst_margin = std::numeric_limits<double>::quiet_NaN();
            res.witnesses = {Witness{"evaluation error", samples[k].t, samples[k].x, samples[k].u, 0.0}};
            return res;
        }
    }

    if (ne == 0) {
        res.verdict = Verdict::Pass;
        res.worst_margin = kInf;
        res.message = "no entries to test";
        return res;
    }

    std::vector<bool> active(ne, false);
    for (const auto& v : values)
        for (std::size_t e = 0; e < ne; ++e)
            if (std::abs(v[e]) > res.eps) active[e] = true;

    double worst = kInf;
    bool any_active = false;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        for (std::size_t e = 0; e < ne; ++e) {
            if (!active[e]) continue;
            any_active = true;
            worst = std::min(worst, values[k][e]);
            witnesses.offer(Witness{entries.labels[e], samples[k].t, samples[k].x, samples[k].u, values[k][e]});
        }
    }
    res.worst_margin = any_active ? worst : 0.0;
    res.verdict = res.worst_margin >= -res.eps ? Verdict::Pass : Verdict::Fail;
    res.witnesses = witnesses.take();
    if (!any_active) res.message = "all entries vanish at every sample";
    return res;
}

std::vector<Sample> draw_samples(const ClosedLoopModel& mdl, int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample count must be positive");
    const OrderInterval ubox = estimate_input_box(mdl, 256, seed);
    QuasiRandom qr(1 + mdl.n() + mdl.m(), seed);
    std::vector<Sample> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const Vec s = qr.next();
        const std::span<const double> sv(s);
        out.push_back(Sample{s[0] * mdl.period(), mdl.state_box().point_at(sv.subspan(1, mdl.n())),
                             ubox.point_at(sv.subspan(1 + mdl.n()))});
    }
    return out;
}

CheckResult run_sign_check(std::string name, const ClosedLoopModel& mdl, int samples, std::uint64_t seed,
                           const EntrySet& entries, Execution exec) {
    std::vector<Sample> drawn;
    try {
        drawn = draw_samples(mdl, samples, seed);
    } catch (const EvalError& e) {
        CheckResult res;
        res.name = std::move(name);
        res.eps = kJacobianSignEps;
        res.seed = seed;
        res.verdict = Verdict::Indeterminate;
        res.worst_margin = std::numeric_limits<double>::quiet_NaN();
        res.message = std::string("evaluation failed: ") + e.what();
        return res;
    }
    return sampled_sign_check(std::move(name), drawn, entries, seed, exec);
}

}  // namespace

OrderInterval estimate_input_box(const ClosedLoopModel& mdl, int samples, std::uint64_t seed) {
    const std::size_t n = mdl.n(), m = mdl.m();
    Vec lo(m, kInf), hi(m, -kInf), u(m);
    std::string last_error;
    auto visit = [&](const Vec& x) {
        try {
            mdl.output(x, u);
        } catch (const EvalError& e) {
            last_error = e.what();
            return;
        }
        for (std::size_t j = 0; j < m; ++j) {
            lo[j] = std::min(lo[j], u[j]);
            hi[j] = std::max(hi[j], u[j]);
        }
    };
    const auto& box = mdl.state_box();
    if (n <= 12) {
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            Vec x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1 ? box.hi()[i] : box.lo()[i];
            visit(x);
        }
    }
    QuasiRandom qr(n, seed ^ 0x9e3779b97f4a7c15ULL);
    for (int k = 0; k < samples; ++k) visit(box.point_at(qr.next()));
    if (m > 0 && lo[0] > hi[0]) throw EvalError("output h fails at every sampled state: " + last_error);

    const auto& cone = mdl.input_cone();
    Vec a(m), b(m);
    for (std::size_t j = 0; j < m; ++j) {
        a[j] = cone.sign(j) > 0 ? lo[j] : hi[j];
        b[j] = cone.sign(j) > 0 ? hi[j] : lo[j];
    }
    return OrderInterval(cone, std::move(a), std::move(b));
}

CheckResult check_A1_quasimonotone(const ClosedLoopModel& mdl, int samples, std::uint64_t seed, Execution exec) {
    const std::size_t n = mdl.n();
    const auto& k = mdl.state_cone();
    EntrySet entries;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) entries.labels.push_back(entry_label("f", i, "x", j));
    entries.eval = [&](const Sample& s, std::span<double> out) {
        Vec col(n);
        std::size_t e = 0;
        auto fn = [&](std::span<const double> x, std::span<double> dx) { mdl.open_loop(s.t, x, s.u, dx); };
        std::vector<Vec> cols(n);
        for (std::size_t j = 0; j < n; ++j) {
            fd_column(fn, s.x, j, col);
            cols[j] = col;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) out[e++] = k.sign(i) * k.sign(j) * cols[j][i];
    };
    return run_sign_check("A1_quasimonotone", mdl, samples, seed, entries, exec);
}

CheckResult check_A2_input_monotone(const ClosedLoopModel& mdl, int samples, std::uint64_t seed, Execution exec) {
    const std::size_t n = mdl.n(), m = mdl.m();
    const auto& k = mdl.state_cone();
    const auto& uc = mdl.input_cone();
    EntrySet entries;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) entries.labels.push_back(entry_label("f", i, "u", j));
    entries.eval = [&](const Sample& s, std::span<double> out) {
        auto fn = [&](std::span<const double> u, std::span<double> dx) { mdl.open_loop(s.t, s.x, u, dx); };
        std::vector<Vec> cols(m, Vec(n));
        for (std::size_t j = 0; j < m; ++j) fd_column(fn, s.u, j, cols[j]);
        std::size_t e = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) out[e++] = k.sign(i) * uc.sign(j) * cols[j][i];
    };
    return run_sign_check("A2_input_monotone", mdl, samples, seed, entries, exec);
}

CheckResult check_A3_output_decreasing(const ClosedLoopModel& mdl, int samples, std::uint64_t seed, Execution exec) {
    const std::size_t n = mdl.n(), m = mdl.m();
    const auto& k = mdl.state_cone();
    const auto& uc = mdl.input_cone();
    EntrySet entries;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i) entries.labels.push_back(entry_label("h", j, "x", i));
    entries.eval = [&](const Sample& s, std::span<double> out) {
        auto fn = [&](std::span<const double> x, std::span<double> u) { mdl.output(x, u); };
        std::vector<Vec> cols(n, Vec(m));
        for (std::size_t i = 0; i < n; ++i) fd_column(fn, s.x, i, cols[i]);
        std::size_t e = 0;
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < n; ++i) out[e++] = -uc.sign(j) * k.sign(i) * cols[i][j];
    };
    return run_sign_check("A3_output_decreasing", mdl, samples, seed, entries, exec);
}

CheckResult check_bracket_condition(const DoubledModel& dm, std::span<const double> x0, std::span<const double> y0,
                                    const IntegratorSettings& s) {
    const auto& k = dm.base().state_cone();
    if (x0.size() != k.dim() || y0.size() != k.dim()) throw DimensionError("check_bracket_condition: dimension mismatch");
    if (!cmp_leq(k, x0, y0, 0.0)) throw PreconditionError("check_bracket_condition: x0 is not below y0 in the K order");

    CheckResult res;
    res.name = "bracket_condition";
    res.eps = 1e-8 * (1.0 + sup_norm(y0));
    res.samples_used = 1;

    const Vec a0 = concat(x0, y0);
    Vec a1;
    try {
        a1 = doubled_map(dm, a0, s);
    } catch (const std::exception& e) {
        res.verdict = Verdict::Indeterminate;
        res.message = e.what();
        return res;
    }
    const std::size_t n = x0.size();
    const auto& c = dm.cone();
    WitnessSet witnesses;
    double worst = kInf;
    for (std::size_t i = 0; i < a0.size(); ++i) {
        const double m = c.sign(i) * (a1[i] - a0[i]);
        worst = std::min(worst, m);
        const std::string label = (i < n ? "x" : "y") + std::to_string(i % n + 1);
        witnesses.offer(Witness{label, dm.base().period(), a0, {}, m});
    }
    res.worst_margin = worst;
    res.verdict = worst >= -res.eps ? Verdict::Pass : Verdict::Fail;
    res.witnesses = witnesses.take();
    res.values = {{"displacement_sup", sup_distance(a1, a0)}};
    return res;
}

CheckResult verify_box_invariance(const ClosedLoopModel& mdl, const OrderInterval& box, int time_samples,
                                  int face_samples, std::uint64_t seed, Execution exec) {
    if (box.dim() != mdl.n()) throw DimensionError("verify_box_invariance: dimension mismatch");
    if (time_samples < 1 || face_samples < 1) throw std::invalid_argument("verify_box_invariance: sample counts must be positive");
    const std::size_t n = mdl.n();
    const auto& k = box.cone();

    CheckResult res;
    res.name = "box_invariance";
    res.eps = kBoxInvarianceEps;
    res.seed = seed;

    QuasiRandom qr(n, seed);
    std::vector<Vec> face_points(static_cast<std::size_t>(face_samples));
    for (auto& p : face_points) p = box.point_at(qr.next());
    Vec times(static_cast<std::size_t>(time_samples));
    for (int j = 0; j < time_samples; ++j) times[static_cast<std::size_t>(j)] = mdl.period() * j / time_samples;

    // One task per (face, face point); faces ordered x1=lo, x1=hi, x2=lo, ...
    const std::size_t tasks = 2 * n * face_points.size();
    std::vector<Witness> best(tasks);
    std::vector<std::optional<std::string>> errors(tasks);
    for_each_index(tasks, exec, [&](std::size_t task) {
        const std::size_t face = task / face_points.size();
        const std::size_t i = face / 2;
        const bool upper = face % 2 == 1;
        Vec x = face_points[task % face_points.size()];
        x[i] = upper ? box.hi()[i] : box.lo()[i];
        Witness w{"x" + std::to_string(i + 1) + (upper ? "=hi" : "=lo"), 0.0, x, {}, kInf};
        try {
            for (double t : times) {
                const double fi = mdl.closed_loop(t, x)[i];
                const double margin = upper ? -k.sign(i) * fi : k.sign(i) * fi;
                if (margin < w.margin) {
                    w.margin = margin;
                    w.t = t;
                }
            }
        } catch (const std::exception& e) {
            errors[task] = e.what();
        }
        best[task] = std::move(w);
    });

    res.samples_used = static_cast<std::int64_t>(tasks * times.size());
    for (std::size_t t = 0; t < tasks; ++t) {
        if (errors[t]) {
            res.verdict = Verdict::Indeterminate;
            res.worst_margin = std::numeric_limits<double>::quiet_NaN();
            res.message = "evaluation failed: " + *errors[t];
            res.witnesses = {best[t]};
            return res;
        }
    }
    WitnessSet witnesses;
    double worst = kInf;
    for (auto& w : best) {
        worst = std::min(worst, w.margin);
        witnesses.offer(std::move(w));
    }
    res.worst_margin = worst;
    res.verdict = worst >= -res.eps ? Verdict::Pass : Verdict::Fail;
    res.witnesses = witnesses.take();
    return res;
}

std::string_view to_string(CertificateStatus s) {
    switch (s) {
        case CertificateStatus::Converged: return "converged";
        case CertificateStatus::MaxIters: return "max_iters";
        case CertificateStatus::BracketViolated: return "bracket_violated";
    }
    return "max_iters";
}

ConvergenceCertificate bracket_converge(const DoubledModel& dm, std::span<const double> x0, std::span<const double> y0,
                                        double tol, double residual_tol, int max_iters, const IntegratorSettings& s,
                                        Execution exec) {
    const auto& k = dm.base().state_cone();
    if (x0.size() != k.dim() || y0.size() != k.dim()) throw DimensionError("bracket_converge: dimension mismatch");
    if (!cmp_leq(k, x0, y0, 0.0)) throw PreconditionError("bracket_converge: x0 is not below y0 in the K order");
    if (!(tol > 0) || !(residual_tol > 0) || max_iters < 0)
        throw std::invalid_argument("bracket_converge: need tol > 0, residual_tol > 0, max_iters >= 0");

    const auto& c = dm.cone();
    const std::size_t n = x0.size();
    ConvergenceCertificate cert;
    cert.tol = tol;
    cert.residual_tol = residual_tol;

    Vec a = concat(x0, y0), b = concat(y0, x0);
    double gap = sup_distance(a, b);
    cert.chain_log.push_back(ChainStep{0, gap, 0.0, order_margin(c, a, b), 0.0});

    auto midpoint = [n](const Vec& z) {
        Vec r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = 0.5 * (z[i] + z[n + i]);
        return r;
    };

    int iter = 0;
    for (;;) {
        if (gap < tol) {
            Vec r = midpoint(a);
            const double residual = sup_distance(flow(dm.base().field(), 0.0, r, dm.base().period(), s).state, r);
            cert.r = std::move(r);
            cert.fixed_point_residual = residual;
            if (residual < residual_tol) {
                cert.status = CertificateStatus::Converged;
                break;
            }
        }
        if (iter >= max_iters) {
            cert.status = CertificateStatus::MaxIters;
            break;
        }
        auto next = doubled_map_batch(dm, {a, b}, s, exec);
        ChainStep step;
        step.k = iter + 1;
        step.margin_a = order_margin(c, a, next[0]);
        step.margin_ab = order_margin(c, next[0], next[1]);
        step.margin_b = order_margin(c, next[1], b);
        step.gap = sup_distance(next[0], next[1]);
        cert.chain_log.push_back(step);
        a = std::move(next[0]);
        b = std::move(next[1]);
        gap = step.gap;
        ++iter;
        if (std::min({step.margin_a, step.margin_ab, step.margin_b}) < -kChainEps) {
            cert.status = CertificateStatus::BracketViolated;
            cert.violation_iteration = iter;
            break;
        }
    }
    cert.p = std::move(a);
    cert.q = std::move(b);
    cert.gap = gap;
    cert.iterations = iter;
    if (cert.status != CertificateStatus::Converged && cert.r.empty()) cert.r = midpoint(cert.p);
    return cert;
}

double phase_defect(const DoubledModel& dm, std::span<const double> a0, std::span<const double> p, int k,
                    double t_star, const IntegratorSettings& s) {
    const double tau = dm.base().period();
    const Vec chain = flow(dm.field(), 0.0, a0, k * tau + t_star, s).state;
    const Vec limit = flow(dm.field(), 0.0, p, t_star, s).state;
    return sup_distance(chain, limit);
}

}  // namespace perifix
