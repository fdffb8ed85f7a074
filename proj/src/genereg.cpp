#include "perifix/genereg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "perifix/errors.hpp"

namespace perifix {

namespace {

constexpr double kPositivityEps = 1e-10;
constexpr double kSlopeEps = 1e-7;

// Minimizes fn on [a, b]; returns the argmin.
double golden_min(const std::function<double(double)>& fn, double a, double b, int iters = 100) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = fn(c), fd = fn(d);
    for (int k = 0; k < iters && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++k) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = fn(d);
        }
    }
    return fc < fd ? c : d;
}

double eval_t(const Expr& e, double t) { return e.eval(Bindings{{"t", t}}); }
double eval_u(const Expr& e, double u) { return e.eval(Bindings{{"u", u}}); }

std::string xname(std::size_t i) { return "x" + std::to_string(i + 1); }

std::string alpha_path(std::size_t i) { return "alpha[" + std::to_string(i) + "]"; }

}  // namespace

GeneSpec reference_gene_spec() {
    GeneSpec spec;
    spec.alphas = {parse_expr("2"), parse_expr("1"), parse_expr("2 - (4/5)*sin(2*pi*t/5)")};
    spec.g = parse_expr("2/(1+u)");
    spec.tau = 5.0;
    return spec;
}

double periodic_minimum(const Expr& e, double tau, std::size_t grid) {
    if (grid < 2) grid = 2;
    std::size_t best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid; ++k) {
        const double v = eval_t(e, tau * static_cast<double>(k) / static_cast<double>(grid));
        if (v < best_v) {
            best_v = v;
            best = k;
        }
    }
    const double step = tau / static_cast<double>(grid);
    const double centre = step * static_cast<double>(best);
    const double t = golden_min([&](double s) { return eval_t(e, s); }, centre - step, centre + step);
    return std::min(best_v, eval_t(e, t));
}

void validate_gene_spec(const GeneSpec& spec) {
    const std::size_t n = spec.n();
    if (n < 2) throw ModelError("n", "gene model needs n >= 2");
    if (!(spec.tau > 0) || !std::isfinite(spec.tau)) throw ModelError("period", "must be a positive finite number");
    if (spec.g.empty()) throw ModelError("g", "missing");
    for (std::size_t i = 0; i < n; ++i) {
        if (spec.alphas[i].empty()) throw ModelError(alpha_path(i), "missing");
        const auto vars = spec.alphas[i].free_variables();
        if (i + 1 < n && !vars.empty())
            throw ModelError(alpha_path(i), "must be constant (only the last rate may depend on t); "
                                            "use a closed_loop model for general time-varying rates");
        for (const auto& v : vars)
            if (v != "t") throw ModelError(alpha_path(i), "unknown variable '" + v + "'");
    }
    for (const auto& v : spec.g.free_variables())
        if (v != "u") throw ModelError("g", "unknown variable '" + v + "'");

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t samples = i + 1 < n ? 1 : 1000;
        for (std::size_t k = 0; k < samples; ++k) {
            const double t = spec.tau * static_cast<double>(k) / static_cast<double>(samples);
            double a = 0;
            try {
                a = eval_t(spec.alphas[i], t);
            } catch (const EvalError& e) {
                throw ModelError(alpha_path(i), e.what());
            }
            if (!(a > kPositivityEps))
                throw ModelError(alpha_path(i), "must be positive, got " + std::to_string(a) + " at t=" + std::to_string(t));
        }
    }

    double g0 = 0;
    try {
        g0 = eval_u(spec.g, 0.0);
    } catch (const EvalError& e) {
        throw ModelError("g", e.what());
    }
    if (!(g0 > 0)) throw ModelError("g", "g(0) must be positive, got " + std::to_string(g0));

    const double upper = g0 / alpha_product(spec);
    constexpr int kSlopeSamples = 200;
    for (int k = 0; k <= kSlopeSamples; ++k) {
        const double u = upper * k / kSlopeSamples;
        double d = 0;
        try {
            d = diff_expr_numeric(spec.g, "u", Bindings{{"u", u}});
        } catch (const EvalError& e) {
            throw ModelError("g", std::string(e.what()) + " at u=" + std::to_string(u));
        }
        if (d > kSlopeEps)
            throw ModelError("g", "must be decreasing, g'(" + std::to_string(u) + ") = " + std::to_string(d));
    }
}

double alpha_product(const GeneSpec& spec) {
    double a = 1.0;
    for (std::size_t i = 0; i + 1 < spec.n(); ++i) a *= eval_t(spec.alphas[i], 0.0);
    return a * periodic_minimum(spec.alphas.back(), spec.tau);
}

OrderInterval compute_box_X(const GeneSpec& spec) {
    const std::size_t n = spec.n();
    Vec hi(n);
    double v = eval_u(spec.g, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = i + 1 < n ? eval_t(spec.alphas[i], 0.0) : periodic_minimum(spec.alphas[i], spec.tau);
        v /= a;
        hi[i] = v;
    }
    return OrderInterval(OrthantCone::positive(n), Vec(n, 0.0), std::move(hi));
}

ClosedLoopModel build_gene_model(const GeneSpec& spec) {
    validate_gene_spec(spec);
    return build_gene_model(spec, compute_box_X(spec));
}

ClosedLoopModel build_gene_model(const GeneSpec& spec, const OrderInterval& box) {
    validate_gene_spec(spec);
    const std::size_t n = spec.n();
    std::vector<Expr> f;
    for (std::size_t i = 0; i < n; ++i) {
        Expr drive = i == 0 ? Expr::variable("u") : Expr::variable(xname(i - 1));
        Expr decay = Expr::binary(ExprOp::Mul, spec.alphas[i], Expr::variable(xname(i)));
        f.push_back(Expr::binary(ExprOp::Sub, std::move(drive), std::move(decay)));
    }
    std::vector<Expr> h{spec.g.substitute("u", Expr::variable(xname(n - 1)))};
    ClosedLoopModel mdl(spec.tau, OrthantCone::positive(n), OrthantCone::positive(1), std::move(f), std::move(h), box);
    check_periodicity(mdl);
    return mdl;
}

CheckResult check_H(const GeneSpec& spec, std::size_t grid_points) {
    CheckResult res;
    res.name = "H";
    res.eps = 0.0;
    if (grid_points < 2) grid_points = 2;

    try {
        const double alpha = alpha_product(spec);
        const double g0 = eval_u(spec.g, 0.0);
        const double upper = g0 / alpha;
        auto neg_slope = [&](double u) { return -diff_expr_numeric(spec.g, "u", Bindings{{"u", u}}, DiffScheme::FivePoint); };

        std::size_t best = 0;
        double best_v = -std::numeric_limits<double>::infinity();
        const double step = upper / static_cast<double>(grid_points - 1);
        for (std::size_t k = 0; k < grid_points; ++k) {
            const double u = k + 1 == grid_points ? upper : step * static_cast<double>(k);
            const double v = neg_slope(u);
            if (v > best_v) {
                best_v = v;
                best = k;
            }
        }
        double arg = best + 1 == grid_points ? upper : step * static_cast<double>(best);
        const double lo = std::max(0.0, arg - step), hi = std::min(upper, arg + step);
        const double refined = golden_min([&](double u) { return -neg_slope(u); }, lo, hi);
        const double refined_v = neg_slope(refined);
        if (refined_v > best_v) {
            best_v = refined_v;
            arg = refined;
        }

        res.samples_used = static_cast<std::int64_t>(grid_points);
        res.worst_margin = alpha - best_v;
        res.verdict = res.worst_margin > 0 ? Verdict::Pass : Verdict::Fail;
        res.values = {{"alpha", alpha},
                      {"alpha_n_min", periodic_minimum(spec.alphas.back(), spec.tau)},
                      {"g0", g0},
                      {"u_upper", upper},
                      {"max_neg_gprime", best_v},
                      {"argmax_u", arg}};
        res.witnesses.push_back(Witness{"-g'(u)", 0.0, Vec{arg}, Vec{}, res.worst_margin});
        res.message = res.passed() ? "max(-g') below alpha" : "max(-g') reaches or exceeds alpha";
    } catch (const EvalError& e) {
        res.verdict = Verdict::Indeterminate;
        res.message = e.what();
    }
    return res;
}

}  // namespace perifix
