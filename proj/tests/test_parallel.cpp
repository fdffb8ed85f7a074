#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <random>
#include <stdexcept>

#include "helpers.hpp"
#include "perifix/certify.hpp"
#include "perifix/parallel.hpp"
#include "perifix/poincare.hpp"

using namespace perifix;
using testing_util::gene_model;

namespace {

std::vector<Vec> random_points(const OrderInterval& box, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(0, 1);
    std::vector<Vec> out;
    for (std::size_t k = 0; k < count; ++k) {
        Vec u(box.dim());
        for (auto& v : u) v = d(rng);
        out.push_back(box.point_at(u));
    }
    return out;
}

}  // namespace

TEST_CASE("for_each_index visits every index once") {
    for (auto exec : {Execution::Serial, Execution::Parallel}) {
        std::vector<std::atomic<int>> hits(97);
        for_each_index(hits.size(), exec, [&](std::size_t i) { hits[i]++; });
        for (auto& h : hits) CHECK(h.load() == 1);
    }
}

TEST_CASE("parallel errors rethrow the lowest failing index") {
    set_threads(4);
    for (int rep = 0; rep < 5; ++rep) {
        try {
            for_each_index(64, Execution::Parallel, [](std::size_t i) {
                if (i == 13 || i == 40) throw std::runtime_error(std::to_string(i));
            });
            FAIL("expected exception");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "13");
        }
    }
    set_threads(0);
}

TEST_CASE("batch kernels match the serial reference bit for bit") {
    const auto mdl = gene_model();
    const auto dm = build_doubled(mdl);
    const auto s = mdl.default_settings();
    set_threads(4);

    const auto xs = random_points(mdl.state_box(), 12, 1);
    const auto a = poincare_batch(mdl, xs, s, Execution::Serial);
    const auto b = poincare_batch(mdl, xs, s, Execution::Parallel);
    CHECK(a == b);
    for (std::size_t k = 0; k < xs.size(); ++k) CHECK(a[k] == poincare_map(mdl, xs[k], s));

    const auto zs = random_points(dm.box(), 8, 2);
    CHECK(doubled_map_batch(dm, zs, s, Execution::Serial) == doubled_map_batch(dm, zs, s, Execution::Parallel));

    const auto grid = uniform_grid(0, 20, 0.5);
    const auto ts = trajectory_batch(mdl.field(), 0, xs, grid, s, Execution::Serial);
    const auto tp = trajectory_batch(mdl.field(), 0, xs, grid, s, Execution::Parallel);
    REQUIRE(ts.size() == tp.size());
    for (std::size_t k = 0; k < ts.size(); ++k) CHECK(ts[k].states == tp[k].states);
    set_threads(0);
}

TEST_CASE("sampled checks and the bracketing chain are execution independent") {
    const auto mdl = gene_model();
    const auto dm = build_doubled(mdl);
    set_threads(4);
    for (auto check : {check_A1_quasimonotone, check_A2_input_monotone, check_A3_output_decreasing}) {
        const auto r1 = check(mdl, 128, 5, Execution::Serial);
        const auto r2 = check(mdl, 128, 5, Execution::Parallel);
        CHECK(r1.worst_margin == r2.worst_margin);
        CHECK(r1.verdict == r2.verdict);
        CHECK(r1.samples_used == r2.samples_used);
    }
    const auto b1 = verify_box_invariance(mdl, mdl.state_box(), 16, 32, 3, Execution::Serial);
    const auto b2 = verify_box_invariance(mdl, mdl.state_box(), 16, 32, 3, Execution::Parallel);
    CHECK(b1.worst_margin == b2.worst_margin);

    const auto s = mdl.default_settings();
    const auto c1 = bracket_converge(dm, Vec{0, 0, 0}, Vec{1, 1, 5.0 / 6.0}, 1e-6, 1e-8, 500, s, Execution::Serial);
    const auto c2 = bracket_converge(dm, Vec{0, 0, 0}, Vec{1, 1, 5.0 / 6.0}, 1e-6, 1e-8, 500, s, Execution::Parallel);
    CHECK(c1.p == c2.p);
    CHECK(c1.q == c2.q);
    CHECK(c1.iterations == c2.iterations);
    set_threads(0);
}
