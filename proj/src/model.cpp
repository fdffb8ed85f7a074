#include "perifix/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "perifix/errors.hpp"
#include "perifix/sampling.hpp"

namespace perifix {

namespace {

constexpr double kCouplingThreshold = 1e-7;

CompiledExpr::SlotMap open_loop_slots(std::size_t n, std::size_t m) {
    CompiledExpr::SlotMap slots{{"t", 0}};
    for (std::size_t i = 0; i < n; ++i) slots["x" + std::to_string(i + 1)] = static_cast<int>(1 + i);
    for (std::size_t j = 0; j < m; ++j) slots["u" + std::to_string(j + 1)] = static_cast<int>(1 + n + j);
    if (m == 1) slots["u"] = static_cast<int>(1 + n);
    return slots;
}

CompiledExpr::SlotMap output_slots(std::size_t n) {
    CompiledExpr::SlotMap slots;
    for (std::size_t i = 0; i < n; ++i) slots["x" + std::to_string(i + 1)] = static_cast<int>(i);
    return slots;
}

// Scratch storage for slot arrays; heap only for very large systems.
class Scratch {
public:
    explicit Scratch(std::size_t size) : size_(size) {
        if (size > fixed_.size()) heap_.resize(size);
    }
    std::span<double> span() { return heap_.empty() ? std::span<double>(fixed_.data(), size_) : std::span<double>(heap_); }

private:
    std::array<double, 64> fixed_{};
    std::vector<double> heap_;
    std::size_t size_;
};

double fd_partial(const ClosedLoopModel& mdl, double t, Vec x, std::size_t i, std::size_t j) {
    const double h = std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x[j]));
    const double xj = x[j];
    x[j] = xj + h;
    const double fp = mdl.closed_loop(t, x)[i];
    x[j] = xj - h;
    const double fm = mdl.closed_loop(t, x)[i];
    return (fp - fm) / (2 * h);
}

}  // namespace

ClosedLoopModel::ClosedLoopModel(double tau, OrthantCone state_cone, OrthantCone input_cone, std::vector<Expr> f,
                                 std::vector<Expr> h, OrderInterval state_box)
    : tau_(tau),
      k_(std::move(state_cone)),
      u_cone_(std::move(input_cone)),
      f_(std::move(f)),
      h_(std::move(h)),
      box_(std::move(state_box)) {
    if (!(tau_ > 0) || !std::isfinite(tau_)) throw ModelError("period", "must be a positive finite number");
    if (f_.empty()) throw ModelError("n", "state dimension must be at least 1");
    if (h_.empty()) throw ModelError("m", "input dimension must be at least 1");
    if (k_.dim() != n()) throw ModelError("cone", "has " + std::to_string(k_.dim()) + " entries, expected " + std::to_string(n()));
    if (u_cone_.dim() != m()) throw ModelError("input_cone", "dimension does not match m");
    if (box_.dim() != n()) throw ModelError("state_box", "dimension does not match n");
    if (!(box_.cone() == k_)) throw ModelError("state_box", "box order differs from the state cone");

    const auto fs = open_loop_slots(n(), m());
    for (std::size_t i = 0; i < f_.size(); ++i) {
        try {
            f_compiled_.emplace_back(f_[i], fs);
        } catch (const EvalError& e) {
            throw ModelError("f[" + std::to_string(i) + "]", e.what());
        }
    }
    const auto hs = output_slots(n());
    for (std::size_t j = 0; j < h_.size(); ++j) {
        try {
            h_compiled_.emplace_back(h_[j], hs);
        } catch (const EvalError& e) {
            throw ModelError("h[" + std::to_string(j) + "]", e.what());
        }
    }
}

IntegratorSettings ClosedLoopModel::default_settings() const {
    IntegratorSettings s;
    s.max_step = tau_ / 100.0;
    return s;
}

void ClosedLoopModel::output(std::span<const double> x, std::span<double> u) const {
    if (x.size() != n() || u.size() != m()) throw DimensionError("output: dimension mismatch");
    for (std::size_t j = 0; j < h_compiled_.size(); ++j) u[j] = h_compiled_[j](x);
}

void ClosedLoopModel::open_loop(double t, std::span<const double> x, std::span<const double> u,
                                std::span<double> dx) const {
    if (x.size() != n() || u.size() != m() || dx.size() != n()) throw DimensionError("open_loop: dimension mismatch");
    Scratch scratch(1 + n() + m());
    auto slots = scratch.span();
    slots[0] = t;
    std::copy(x.begin(), x.end(), slots.begin() + 1);
    std::copy(u.begin(), u.end(), slots.begin() + 1 + static_cast<std::ptrdiff_t>(n()));
    for (std::size_t i = 0; i < f_compiled_.size(); ++i) dx[i] = f_compiled_[i](slots);
}

void ClosedLoopModel::closed_loop(double t, std::span<const double> x, std::span<double> dx) const {
    Scratch u(m());
    output(x, u.span());
    open_loop(t, x, u.span(), dx);
}

Vec ClosedLoopModel::closed_loop(double t, std::span<const double> x) const {
    Vec dx(n());
    closed_loop(t, x, dx);
    return dx;
}

Field ClosedLoopModel::field() const {
    return [this](double t, std::span<const double> x, std::span<double> dx) { closed_loop(t, x, dx); };
}

Vec eval_closed_loop_field(const ClosedLoopModel& mdl, double t, std::span<const double> x) {
    return mdl.closed_loop(t, x);
}

void check_periodicity(const ClosedLoopModel& mdl, int samples, std::uint64_t seed) {
    const std::size_t n = mdl.n();
    QuasiRandom qr(1 + n, seed);
    for (int k = 0; k < samples; ++k) {
        const Vec s = qr.next();
        const double t = s[0] * mdl.period();
        const Vec x = mdl.state_box().point_at(std::span<const double>(s).subspan(1));
        const Vec a = mdl.closed_loop(t, x);
        const Vec b = mdl.closed_loop(t + mdl.period(), x);
        const double defect = sup_distance(a, b);
        if (!(defect <= 1e-10 * std::max(1.0, sup_norm(a)))) {
            throw ModelError("period", "vector field is not periodic with period " + std::to_string(mdl.period()) +
                                           " (defect " + std::to_string(defect) + " at t=" + std::to_string(t) + ")");
        }
    }
}

namespace {

OrderInterval doubled_box(const ClosedLoopModel& base, const OrthantCone& c) {
    const auto& x = base.state_box();
    return OrderInterval(c, concat(x.lo(), x.hi()), concat(x.hi(), x.lo()));
}

}  // namespace

DoubledModel::DoubledModel(ClosedLoopModel base)
    : base_(std::move(base)), cone_(product_cone(base_.state_cone())), box_(doubled_box(base_, cone_)) {}

void DoubledModel::eval(double t, std::span<const double> z, std::span<double> dz) const {
    const std::size_t n = base_.n();
    if (z.size() != 2 * n || dz.size() != 2 * n) throw DimensionError("doubled field: dimension mismatch");
    const auto x = z.first(n);
    const auto y = z.subspan(n);
    Scratch hx(base_.m()), hy(base_.m());
    base_.output(x, hx.span());
    base_.output(y, hy.span());
    base_.open_loop(t, x, hy.span(), dz.first(n));
    base_.open_loop(t, y, hx.span(), dz.subspan(n));
}

Vec DoubledModel::eval(double t, std::span<const double> z) const {
    Vec dz(z.size());
    eval(t, z, dz);
    return dz;
}

Field DoubledModel::field() const {
    return [this](double t, std::span<const double> z, std::span<double> dz) { eval(t, z, dz); };
}

DoubledModel build_doubled(const ClosedLoopModel& mdl) { return DoubledModel(mdl); }

FeedbackSignature classify_cyclic(const ClosedLoopModel& mdl, int samples, std::uint64_t seed) {
    const std::size_t n = mdl.n();
    if (n < 2) throw StructureError("cyclic classification needs n >= 2");
    if (samples < 1) throw std::invalid_argument("classify_cyclic: samples must be positive");

    std::vector<int> pos(n, 0), neg(n, 0), zero(n, 0);
    QuasiRandom qr(1 + n, seed);
    for (int k = 0; k < samples; ++k) {
        const Vec s = qr.next();
        const double t = s[0] * mdl.period();
        const Vec x = mdl.state_box().point_at(std::span<const double>(s).subspan(1));
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t prev = (i + n - 1) % n;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double d = fd_partial(mdl, t, x, i, j);
                if (j == prev) {
                    if (d > kCouplingThreshold) ++pos[i];
                    else if (d < -kCouplingThreshold) ++neg[i];
                    else ++zero[i];
                } else if (std::abs(d) > kCouplingThreshold) {
                    throw StructureError("non-cyclic coupling: dF" + std::to_string(i + 1) + "/dx" + std::to_string(j + 1) +
                                         " = " + std::to_string(d) + " at t=" + std::to_string(t));
                }
            }
        }
    }

    FeedbackSignature sig;
    sig.delta_product = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const int d = pos[i] == samples ? 1 : neg[i] == samples ? -1 : 0;
        sig.deltas.push_back(d);
        sig.delta_product *= d;
    }
    return sig;
}

}  // namespace perifix
