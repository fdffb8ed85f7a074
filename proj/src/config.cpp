#include "perifix/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "perifix/errors.hpp"

namespace perifix {

namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) throw ModelError(key, "missing required key");
    return *it;
}

std::size_t read_count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() < 1) throw ModelError(path, "must be a positive integer");
    return static_cast<std::size_t>(v.get<long long>());
}

double read_real(const json& v, const std::string& path) {
    if (!v.is_number()) throw ModelError(path, "must be a number");
    return v.get<double>();
}

Expr read_expr(const json& v, const std::string& path) {
    if (!v.is_string()) throw ModelError(path, "must be an expression string");
    try {
        return parse_expr(v.get<std::string>());
    } catch (const ParseError& e) {
        throw ModelError(path, e.what());
    }
}

std::vector<Expr> read_exprs(const json& v, const std::string& key, std::size_t expected, const char* dim_name) {
    if (!v.is_array()) throw ModelError(key, "must be an array of expression strings");
    if (v.size() != expected)
        throw ModelError(key, "has " + std::to_string(v.size()) + " entries but " + dim_name + " = " + std::to_string(expected));
    std::vector<Expr> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read_expr(v[i], key + "[" + std::to_string(i) + "]"));
    return out;
}

Vec read_vector(const json& v, const std::string& path, std::size_t expected) {
    if (!v.is_array()) throw ModelError(path, "must be an array of numbers");
    if (v.size() != expected)
        throw ModelError(path, "has " + std::to_string(v.size()) + " entries but n = " + std::to_string(expected));
    Vec out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read_real(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

OrthantCone read_cone(const json& doc, std::size_t n) {
    auto it = doc.find("cone");
    if (it == doc.end()) return OrthantCone::positive(n);
    if (!it->is_array() || it->size() != n) throw ModelError("cone", "must be an array of n entries");
    std::vector<int> signs;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = (*it)[i];
        if (!s.is_number_integer() || (s.get<int>() != 1 && s.get<int>() != -1))
            throw ModelError("cone[" + std::to_string(i) + "]", "must be +1 or -1");
        signs.push_back(s.get<int>());
    }
    return OrthantCone(std::move(signs));
}

OrderInterval read_box(const json& v, const OrthantCone& cone, std::size_t n) {
    if (!v.is_object()) throw ModelError("state_box", "must be an object with lo and hi");
    for (auto it = v.begin(); it != v.end(); ++it)
        if (it.key() != "lo" && it.key() != "hi") throw ModelError("state_box." + it.key(), "unknown key");
    if (!v.contains("lo")) throw ModelError("state_box.lo", "missing required key");
    if (!v.contains("hi")) throw ModelError("state_box.hi", "missing required key");
    Vec lo = read_vector(v["lo"], "state_box.lo", n);
    Vec hi = read_vector(v["hi"], "state_box.hi", n);
    if (!cmp_leq(cone, lo, hi, 0.0)) throw ModelError("state_box", "lo must be below hi in the cone order");
    return OrderInterval(cone, std::move(lo), std::move(hi));
}

void reject_unknown(const json& doc, const std::set<std::string>& allowed) {
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!allowed.contains(it.key())) throw ModelError(it.key(), "unknown key");
}

}  // namespace

ModelDocument load_model_document(const json& doc) {
    if (!doc.is_object()) throw ModelError("", "model document must be a JSON object");
    const json& type_v = require(doc, "type");
    if (!type_v.is_string()) throw ModelError("type", "must be a string");
    const std::string type = type_v.get<std::string>();

    if (type == "closed_loop") {
        reject_unknown(doc, {"type", "n", "m", "period", "f", "h", "state_box", "cone"});
        const std::size_t n = read_count(require(doc, "n"), "n");
        const std::size_t m = doc.contains("m") ? read_count(doc["m"], "m") : 1;
        const double tau = read_real(require(doc, "period"), "period");
        auto f = read_exprs(require(doc, "f"), "f", n, "n");
        auto h = read_exprs(require(doc, "h"), "h", m, "m");
        const OrthantCone cone = read_cone(doc, n);
        OrderInterval box = read_box(require(doc, "state_box"), cone, n);
        ClosedLoopModel mdl(tau, cone, OrthantCone::positive(m), std::move(f), std::move(h), std::move(box));
        check_periodicity(mdl);
        return ModelDocument{type, std::move(mdl), std::nullopt};
    }
    if (type == "gene") {
        reject_unknown(doc, {"type", "n", "m", "period", "alpha", "g", "state_box", "cone"});
        const std::size_t n = read_count(require(doc, "n"), "n");
        if (doc.contains("m") && read_count(doc["m"], "m") != 1) throw ModelError("m", "gene models have m = 1");
        const OrthantCone cone = read_cone(doc, n);
        if (!(cone == OrthantCone::positive(n))) throw ModelError("cone", "gene models use the positive orthant");
        GeneSpec spec;
        spec.tau = read_real(require(doc, "period"), "period");
        spec.alphas = read_exprs(require(doc, "alpha"), "alpha", n, "n");
        spec.g = read_expr(require(doc, "g"), "g");
        validate_gene_spec(spec);
        ClosedLoopModel mdl = doc.contains("state_box") ? build_gene_model(spec, read_box(doc["state_box"], cone, n))
                                                        : build_gene_model(spec);
        return ModelDocument{type, std::move(mdl), std::move(spec)};
    }
    throw ModelError("type", "must be \"closed_loop\" or \"gene\", got \"" + type + "\"");
}

ModelDocument load_model_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelError("", std::string("invalid JSON: ") + e.what());
    }
    return load_model_document(doc);
}

ModelDocument load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("", "cannot open model file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_model_text(ss.str());
}

ClosedLoopModel load_model(const json& doc) { return load_model_document(doc).model; }

}  // namespace perifix
