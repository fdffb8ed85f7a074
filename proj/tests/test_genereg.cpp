#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "perifix/certify.hpp"
#include "perifix/errors.hpp"
#include "perifix/genereg.hpp"

using namespace perifix;

namespace {

GeneSpec spec_of(std::vector<std::string> alphas, const std::string& g, double tau) {
    GeneSpec s;
    for (const auto& a : alphas) s.alphas.push_back(parse_expr(a));
    s.g = parse_expr(g);
    s.tau = tau;
    return s;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

TEST_CASE("reference spec box") {
    const auto box = compute_box_X(reference_gene_spec());
    CHECK(box.lo() == Vec{0, 0, 0});
    CHECK(std::abs(box.hi()[0] - 1.0) < 1e-12);
    CHECK(std::abs(box.hi()[1] - 1.0) < 1e-12);
    CHECK(std::abs(box.hi()[2] - 5.0 / 6.0) < 1e-12);
    CHECK(std::abs(alpha_product(reference_gene_spec()) - 2.4) < 1e-12);
    CHECK(std::abs(periodic_minimum(parse_expr("2 - (4/5)*sin(2*pi*t/5)"), 5.0) - 1.2) < 1e-12);
}

TEST_CASE("unit and scaled boxes") {
    const auto unit = compute_box_X(spec_of({"1", "1"}, "1/(1+u)", 1.0));
    CHECK(unit.hi() == Vec{1, 1});

    const auto base = compute_box_X(reference_gene_spec());
    for (double c : {4.0, 0.5, 3.0, 0.7}) {
        auto s = reference_gene_spec();
        s.g = parse_expr(num(c) + "*(2/(1+u))");
        const auto scaled = compute_box_X(s);
        for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(scaled.hi()[i] - c * base.hi()[i]) <= 4e-16 * c);
    }
}

TEST_CASE("hypothesis H") {
    const auto start = std::chrono::steady_clock::now();
    const auto h = check_H(reference_gene_spec());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(h.passed());
    CHECK(std::abs(h.values.at("alpha") - 2.4) < 1e-9);
    CHECK(std::abs(h.values.at("max_neg_gprime") - 2.0) < 1e-9);
    CHECK(std::abs(h.values.at("argmax_u")) < 1e-6);
    CHECK(std::abs(h.worst_margin - 0.4) < 1e-9);
    CHECK(secs < 1.0);

    auto strong = reference_gene_spec();
    strong.g = parse_expr("4/(1+u)");
    const auto hf = check_H(strong);
    CHECK(hf.verdict == Verdict::Fail);
    CHECK(std::abs(hf.values.at("max_neg_gprime") - 4.0) < 1e-9);
    CHECK(hf.worst_margin < 0);
    CHECK_FALSE(hf.witnesses.empty());

    auto flat = reference_gene_spec();
    flat.g = parse_expr("2");
    const auto hc = check_H(flat);
    CHECK(hc.passed());
    CHECK(std::abs(hc.values.at("max_neg_gprime")) < 1e-9);
}

TEST_CASE("spec validation") {
    CHECK_NOTHROW(validate_gene_spec(reference_gene_spec()));
    CHECK_THROWS_AS(validate_gene_spec(spec_of({"2", "-1", "2"}, "2/(1+u)", 5)), ModelError);
    CHECK_THROWS_AS(validate_gene_spec(spec_of({"2", "1", "2"}, "u", 5)), ModelError);
    CHECK_THROWS_AS(validate_gene_spec(spec_of({"2", "1", "2"}, "1+u", 5)), ModelError);
    CHECK_THROWS_AS(validate_gene_spec(spec_of({"2 + sin(t)", "1", "2"}, "2/(1+u)", 5)), ModelError);
    CHECK_THROWS_AS(validate_gene_spec(spec_of({"2", "1", "1 + sin(2*pi*t/5)"}, "2/(1+u)", 5)), ModelError);
    CHECK_THROWS_AS(validate_gene_spec(spec_of({"2"}, "2/(1+u)", 5)), ModelError);
    CHECK_THROWS_AS(validate_gene_spec(spec_of({"2", "1"}, "2/(1+x)", 5)), ModelError);
    CHECK_THROWS_AS(build_gene_model(spec_of({"2", "-1", "2"}, "2/(1+u)", 5)), ModelError);
}

TEST_CASE("generated model structure") {
    const auto spec = spec_of({"1.5", "0.7", "2", "1 + 0.5*cos(2*pi*t/3)"}, "3/(1+u^2)", 3.0);
    const auto mdl = build_gene_model(spec);
    CHECK(mdl.n() == 4);
    const auto sig = classify_cyclic(mdl, 64);
    CHECK(sig.deltas == std::vector<int>{-1, 1, 1, 1});
    CHECK(sig.delta_product == -1);
    CHECK(check_A1_quasimonotone(mdl, 128, 0).passed());
    CHECK(check_A2_input_monotone(mdl, 128, 0).passed());
    CHECK(check_A3_output_decreasing(mdl, 128, 0).passed());
    CHECK(verify_box_invariance(mdl, mdl.state_box(), 32, 64, 0).passed());
    const auto& box = mdl.state_box();
    CHECK(check_bracket_condition(build_doubled(mdl), box.lo(), box.hi(), mdl.default_settings()).passed());
}

TEST_CASE("H implies convergence on randomized Hill specs") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> ua(0.5, 3.0), uf(0.1, 0.9), ub(0.5, 3.0), ut(0.2, 2.0), utau(1.0, 8.0);
    std::uniform_int_distribution<int> un(2, 5), um(1, 4);
    int tested = 0;
    for (int draw = 0; draw < 400 && tested < 12; ++draw) {
        const int n = un(rng);
        const double tau = utau(rng);
        std::vector<std::string> alphas;
        for (int i = 0; i + 1 < n; ++i) alphas.push_back(num(ua(rng)));
        const double mean = ua(rng), amp = uf(rng) * mean;
        alphas.push_back(num(mean) + " + " + num(amp) + "*sin(2*pi*t/" + num(tau) + ")");
        const double beta = ub(rng), theta = ut(rng);
        const int hill = um(rng);
        const std::string g = num(beta) + "/(1 + (u/" + num(theta) + ")^" + std::to_string(hill) + ")";
        const auto spec = spec_of(alphas, g, tau);

        // Independent H margin from the analytic Hill derivative.
        double alpha = mean - amp;
        for (int i = 0; i + 1 < n; ++i) alpha *= std::stod(alphas[i]);
        const double upper = beta / alpha;
        double max_neg = 0;
        for (int k = 0; k <= 20000; ++k) {
            const double u = upper * k / 20000.0, z = std::pow(u / theta, hill);
            const double d = beta * hill * std::pow(u / theta, hill - 1) / theta / ((1 + z) * (1 + z));
            max_neg = std::max(max_neg, d);
        }
        const auto h = check_H(spec);
        CHECK(std::abs(h.values.at("alpha") - alpha) < 1e-9 * alpha);
        CHECK(h.values.at("max_neg_gprime") >= max_neg - 1e-6);
        if (!(h.worst_margin > 0.2 * alpha)) continue;
        CHECK(max_neg < 0.8 * alpha + 1e-6);

        const auto mdl = build_gene_model(spec);
        const auto& box = mdl.state_box();
        const auto cert =
            bracket_converge(build_doubled(mdl), box.lo(), box.hi(), 1e-6, 1e-8, 500, mdl.default_settings());
        CHECK_MESSAGE(cert.status == CertificateStatus::Converged, g, " n=", n);
        ++tested;
    }
    CHECK(tested >= 10);
}
