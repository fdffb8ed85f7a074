#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "perifix/config.hpp"
#include "perifix/errors.hpp"

using namespace perifix;
using nlohmann::json;

namespace {

json gene_doc() {
    return json::parse(R"json({"type": "gene", "n": 3, "period": 5,
        "alpha": ["2", "1", "2 - (4/5)*sin(2*pi*t/5)"], "g": "2/(1+u)"})json");
}

json loop_doc() {
    return json::parse(R"json({"type": "closed_loop", "n": 2, "period": 1,
        "f": ["u1 - x1", "x1 - x2"], "h": ["1/(1+x2)"],
        "state_box": {"lo": [0, 0], "hi": [1, 1]}})json");
}

std::string error_path(const json& doc) {
    try {
        load_model_document(doc);
    } catch (const ModelError& e) {
        return e.path();
    }
    return "<no error>";
}

}  // namespace

TEST_CASE("gene document") {
    const auto doc = load_model_document(gene_doc());
    CHECK(doc.type == "gene");
    REQUIRE(doc.gene.has_value());
    CHECK(doc.model.n() == 3);
    CHECK(doc.model.period() == 5.0);
    CHECK(doc.model.state_box().lo() == Vec{0, 0, 0});
    CHECK(std::abs(doc.model.state_box().hi()[2] - 5.0 / 6.0) < 1e-12);

    auto with_box = gene_doc();
    with_box["state_box"] = {{"lo", {0, 0, 0}}, {"hi", {2, 2, 2}}};
    CHECK(load_model_document(with_box).model.state_box().hi() == Vec{2, 2, 2});
}

TEST_CASE("file loading matches the closed-loop form") {
    const auto gene = load_model_file(PERIFIX_TEST_DATA "/gene.json");
    const auto loop = load_model_file(PERIFIX_TEST_DATA "/gene_closed_loop.json");
    CHECK(loop.type == "closed_loop");
    CHECK_FALSE(loop.gene.has_value());
    for (double t : {0.0, 1.3, 4.9})
        for (const Vec& x : {Vec{0, 0, 0}, Vec{0.3, 0.9, 0.1}, Vec{1, 1, 0.8}}) {
            const auto a = gene.model.closed_loop(t, x);
            const auto b = loop.model.closed_loop(t, x);
            for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-15);
        }
    CHECK_THROWS_AS(load_model_file(PERIFIX_TEST_DATA "/missing.json"), std::runtime_error);
}

TEST_CASE("schema errors name the field") {
    auto d = gene_doc();
    d.erase("period");
    CHECK(error_path(d) == "period");

    auto l = loop_doc();
    l["f"] = {"u1 - x1"};
    CHECK(error_path(l) == "f");

    l = loop_doc();
    l["colour"] = "red";
    CHECK(error_path(l) == "colour");

    l = loop_doc();
    l["f"][1] = "x1 - x2 +";
    CHECK(error_path(l) == "f[1]");

    l = loop_doc();
    l["h"][0] = "x3";
    CHECK(error_path(l) == "h[0]");

    l = loop_doc();
    l["state_box"]["hi"] = {1};
    CHECK(error_path(l) == "state_box.hi");

    l = loop_doc();
    l["state_box"]["lo"] = {2, 0};
    CHECK(error_path(l) == "state_box");

    l = loop_doc();
    l.erase("state_box");
    CHECK(error_path(l) == "state_box");

    l = loop_doc();
    l["cone"] = {1, 0};
    CHECK(error_path(l) == "cone[1]");

    l = loop_doc();
    l["type"] = "linear";
    CHECK(error_path(l) == "type");

    l = loop_doc();
    l["f"][0] = "u1 - x1 + sin(t)";
    CHECK(error_path(l) == "period");

    d = gene_doc();
    d["alpha"][1] = "-1";
    CHECK(error_path(d) != "<no error>");

    d = gene_doc();
    d["m"] = 2;
    CHECK(error_path(d) == "m");

    CHECK_THROWS_AS(load_model_text("{not json"), ModelError);
}

TEST_CASE("defaults") {
    const auto doc = load_model_document(loop_doc());
    CHECK(doc.model.m() == 1);
    CHECK(doc.model.state_cone() == OrthantCone::positive(2));
    auto alias = loop_doc();
    alias["f"][0] = "u - x1";
    CHECK(load_model_document(alias).model.closed_loop(0, Vec{0, 0}) == Vec{1, 0});
}
