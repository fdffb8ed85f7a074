#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace perifix {

using Vec = std::vector<double>;

inline constexpr double kDefaultOrderEps = 1e-9;

// Orthant cone {x : signs[i] * x[i] >= 0}. Self-dual, so every order test is
// a componentwise sign test.
class OrthantCone {
public:
    OrthantCone() = default;
    explicit OrthantCone(std::vector<int> signs);

    static OrthantCone positive(std::size_t n);

    std::size_t dim() const noexcept { return signs_.size(); }
    int sign(std::size_t i) const { return signs_[i]; }
    const std::vector<int>& signs() const noexcept { return signs_; }

    bool operator==(const OrthantCone&) const = default;

private:
    std::vector<int> signs_;
};

// true iff x <=_K y, i.e. signs_i * (y_i - x_i) >= -eps for every i.
bool cmp_leq(const OrthantCone& cone, std::span<const double> x, std::span<const double> y,
             double eps = kDefaultOrderEps);

// min_i signs_i * (y_i - x_i); >= 0 exactly when x <=_K y. +inf for dim 0.
double order_margin(const OrthantCone& cone, std::span<const double> x, std::span<const double> y);

// C = K x (-K) on R^{2n}: (x,y) <=_C (x',y') iff x <=_K x' and y' <=_K y.
OrthantCone product_cone(const OrthantCone& k);

// Order interval [lo, hi]_cone. For orthant cones this is a box.
class OrderInterval {
public:
    OrderInterval(OrthantCone cone, Vec lo, Vec hi);

    const OrthantCone& cone() const noexcept { return cone_; }
    const Vec& lo() const noexcept { return lo_; }
    const Vec& hi() const noexcept { return hi_; }
    std::size_t dim() const noexcept { return lo_.size(); }

    // Componentwise numeric bounds, independent of the cone signs.
    double lower_bound(std::size_t i) const;
    double upper_bound(std::size_t i) const;

    // Maps unit-cube coordinates s in [0,1]^n to the point lo + s * (hi - lo).
    Vec point_at(std::span<const double> s) const;

private:
    OrthantCone cone_;
    Vec lo_;
    Vec hi_;
};

bool in_interval(const OrderInterval& ival, std::span<const double> x, double eps = kDefaultOrderEps);

// Concatenation helpers for doubled-space vectors z = (x, y).
Vec concat(std::span<const double> x, std::span<const double> y);
Vec swap_halves(std::span<const double> z);

double sup_distance(std::span<const double> a, std::span<const double> b);
double sup_norm(std::span<const double> a);

}  // namespace perifix
