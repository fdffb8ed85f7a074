#include "perifix/order.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "perifix/errors.hpp"

namespace perifix {

namespace {

void require_dims(std::size_t cone_dim, std::size_t a, std::size_t b, const char* op) {
    if (a != cone_dim || b != cone_dim) {
        throw DimensionError(std::string(op) + ": dimension mismatch (cone " + std::to_string(cone_dim) +
                             ", vectors " + std::to_string(a) + " and " + std::to_string(b) + ")");
    }
}

}  // namespace

OrthantCone::OrthantCone(std::vector<int> signs) : signs_(std::move(signs)) {
    for (int s : signs_) {
        if (s != 1 && s != -1) throw std::invalid_argument("OrthantCone: sign entries must be +1 or -1");
    }
}

OrthantCone OrthantCone::positive(std::size_t n) { return OrthantCone(std::vector<int>(n, 1)); }

bool cmp_leq(const OrthantCone& cone, std::span<const double> x, std::span<const double> y, double eps) {
    require_dims(cone.dim(), x.size(), y.size(), "cmp_leq");
    if (eps < 0) throw std::invalid_argument("cmp_leq: eps must be nonnegative");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(cone.sign(i) * (y[i] - x[i]) >= -eps)) return false;
    }
    return true;
}

double order_margin(const OrthantCone& cone, std::span<const double> x, std::span<const double> y) {
    require_dims(cone.dim(), x.size(), y.size(), "order_margin");
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) m = std::min(m, cone.sign(i) * (y[i] - x[i]));
    return m;
}

OrthantCone product_cone(const OrthantCone& k) {
    std::vector<int> s(k.signs());
    for (int v : k.signs()) s.push_back(-v);
    return OrthantCone(std::move(s));
}

OrderInterval::OrderInterval(OrthantCone cone, Vec lo, Vec hi)
    : cone_(std::move(cone)), lo_(std::move(lo)), hi_(std::move(hi)) {
    require_dims(cone_.dim(), lo_.size(), hi_.size(), "OrderInterval");
    if (!cmp_leq(cone_, lo_, hi_, 0.0)) throw std::invalid_argument("OrderInterval: lo is not below hi in the cone order");
}

double OrderInterval::lower_bound(std::size_t i) const { return std::min(lo_[i], hi_[i]); }
double OrderInterval::upper_bound(std::size_t i) const { return std::max(lo_[i], hi_[i]); }

Vec OrderInterval::point_at(std::span<const double> s) const {
    if (s.size() != dim()) throw DimensionError("OrderInterval::point_at: dimension mismatch");
    Vec p(dim());
    for (std::size_t i = 0; i < dim(); ++i) p[i] = lo_[i] + s[i] * (hi_[i] - lo_[i]);
    return p;
}

bool in_interval(const OrderInterval& ival, std::span<const double> x, double eps) {
    return cmp_leq(ival.cone(), ival.lo(), x, eps) && cmp_leq(ival.cone(), x, ival.hi(), eps);
}

Vec concat(std::span<const double> x, std::span<const double> y) {
    Vec z(x.begin(), x.end());
    z.insert(z.end(), y.begin(), y.end());
    return z;
}

Vec swap_halves(std::span<const double> z) {
    if (z.size() % 2 != 0) throw DimensionError("swap_halves: odd dimension");
    const std::size_t n = z.size() / 2;
    return concat(z.subspan(n), z.first(n));
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("sup_distance: dimension mismatch");
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double sup_norm(std::span<const double> a) {
    double d = 0;
    for (double v : a) d = std::max(d, std::abs(v));
    return d;
}

}  // namespace perifix
