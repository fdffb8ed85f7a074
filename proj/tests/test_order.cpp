#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "perifix/errors.hpp"
#include "perifix/order.hpp"

using namespace perifix;

TEST_CASE("cmp_leq on the positive orthant") {
    const auto k = OrthantCone::positive(3);
    CHECK(cmp_leq(k, Vec{0, 0, 0}, Vec{1, 1, 5.0 / 6.0}, 0.0));
    CHECK_FALSE(cmp_leq(k, Vec{1, 1, 5.0 / 6.0}, Vec{0, 0, 0}, 0.0));
    const auto k2 = OrthantCone::positive(2);
    CHECK_FALSE(cmp_leq(k2, Vec{1, 0}, Vec{0, 1}, 0.0));
    CHECK_FALSE(cmp_leq(k2, Vec{0, 1}, Vec{1, 0}, 0.0));
    CHECK(cmp_leq(k2, Vec{0.3, -2}, Vec{0.3, -2}, 0.0));
}

TEST_CASE("cmp_leq tolerance and errors") {
    const auto k = OrthantCone::positive(2);
    CHECK(cmp_leq(k, Vec{1e-10, 0}, Vec{0, 0}, 1e-9));
    CHECK_FALSE(cmp_leq(k, Vec{1e-8, 0}, Vec{0, 0}, 1e-9));
    CHECK_THROWS_AS(cmp_leq(k, Vec{0, 0, 0}, Vec{0, 0}), DimensionError);
    CHECK_THROWS_AS(cmp_leq(k, Vec{0, 0}, Vec{0, 0}, -1.0), std::invalid_argument);
    CHECK_THROWS(OrthantCone({1, 0}));
}

TEST_CASE("in_interval is closed") {
    const OrderInterval x(OrthantCone::positive(3), Vec{0, 0, 0}, Vec{1, 1, 5.0 / 6.0});
    CHECK(in_interval(x, Vec{0.5, 0.5, 0.4}));
    CHECK_FALSE(in_interval(x, Vec{1.1, 0, 0}));
    CHECK(in_interval(x, x.lo()));
    CHECK(in_interval(x, x.hi()));
    CHECK_THROWS_AS(in_interval(x, Vec{0, 0}), DimensionError);
    CHECK_THROWS(OrderInterval(OrthantCone::positive(1), Vec{1}, Vec{0}));
}

TEST_CASE("product cone") {
    CHECK(product_cone(OrthantCone::positive(3)).signs() == std::vector<int>{1, 1, 1, -1, -1, -1});
    CHECK(product_cone(OrthantCone::positive(1)).signs() == std::vector<int>{1, -1});

    const auto c = product_cone(OrthantCone::positive(3));
    const Vec x0{0, 0, 0}, y0{1, 1, 5.0 / 6.0};
    CHECK(cmp_leq(c, concat(x0, y0), concat(y0, x0), 0.0));

    // An interval under a mixed cone stores hi below lo numerically in the flipped coordinates.
    const OrderInterval ival(c, concat(x0, y0), concat(y0, x0));
    CHECK(in_interval(ival, Vec{0.5, 0.5, 0.5, 0.5, 0.5, 0.5}));
    CHECK(ival.lower_bound(3) == 0.0);
    CHECK(ival.upper_bound(3) == 1.0);
}

TEST_CASE("partial order axioms and product-cone swap (fuzzed)") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> small(-2, 2);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + trial % 4;
        std::vector<int> signs(n);
        for (auto& s : signs) s = coin(rng) ? 1 : -1;
        const OrthantCone k(signs);
        auto draw = [&] {
            Vec v(n);
            for (auto& e : v) e = small(rng);
            return v;
        };
        const Vec x = draw(), y = draw(), z = draw(), w = draw();
        CHECK(cmp_leq(k, x, x, 0.0));
        if (cmp_leq(k, x, y, 0.0) && cmp_leq(k, y, x, 0.0)) CHECK(x == y);
        if (cmp_leq(k, x, y, 0.0) && cmp_leq(k, y, z, 0.0)) CHECK(cmp_leq(k, x, z, 0.0));

        const auto c = product_cone(k);
        const bool lhs = cmp_leq(c, concat(x, y), concat(z, w), 0.0);
        CHECK(lhs == (cmp_leq(k, x, z, 0.0) && cmp_leq(k, w, y, 0.0)));
        CHECK(lhs == cmp_leq(c, concat(w, z), concat(y, x), 0.0));

        Vec lo(n), hi(n);
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = signs[i] > 0 ? std::min(x[i], y[i]) : std::max(x[i], y[i]);
            hi[i] = signs[i] > 0 ? std::max(x[i], y[i]) : std::min(x[i], y[i]);
        }
        const OrderInterval ival(k, lo, hi);
        CHECK(in_interval(ival, lo, 0.0));
        CHECK(in_interval(ival, hi, 0.0));
    }
}

TEST_CASE("vector helpers") {
    CHECK(swap_halves(Vec{1, 2, 3, 4}) == Vec{3, 4, 1, 2});
    CHECK_THROWS_AS(swap_halves(Vec{1, 2, 3}), DimensionError);
    CHECK(sup_distance(Vec{1, 2}, Vec{0, 4}) == 2.0);
    CHECK(order_margin(OrthantCone::positive(2), Vec{0, 0}, Vec{1, -0.5}) == -0.5);
}
