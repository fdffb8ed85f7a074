#include "perifix/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace perifix {

using nlohmann::json;

std::string content_digest(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json json_number(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

namespace {

json vec_json(const Vec& v) {
    json a = json::array();
    for (double x : v) a.push_back(json_number(x));
    return a;
}

}  // namespace

json to_json(const IntegratorSettings& s) {
    return {{"method", "dormand_prince_5_4"},
            {"rtol", s.rtol},
            {"atol", s.atol},
            {"max_step", json_number(s.max_step)},
            {"max_steps", s.max_steps}};
}

json to_json(const CheckResult& c) {
    json w = json::array();
    for (const auto& x : c.witnesses)
        w.push_back({{"where", x.where}, {"t", x.t}, {"x", vec_json(x.x)}, {"u", vec_json(x.u)}, {"margin", json_number(x.margin)}});
    json values = json::object();
    for (const auto& [k, v] : c.values) values[k] = json_number(v);
    return {{"name", c.name},
            {"verdict", std::string(to_string(c.verdict))},
            {"worst_margin", json_number(c.worst_margin)},
            {"eps", c.eps},
            {"samples_used", c.samples_used},
            {"seed", c.seed},
            {"values", values},
            {"message", c.message},
            {"witnesses", w}};
}

json to_json(const ConvergenceCertificate& c) {
    json log = json::array();
    for (const auto& s : c.chain_log)
        log.push_back({{"k", s.k},
                       {"gap", json_number(s.gap)},
                       {"margin_a", json_number(s.margin_a)},
                       {"margin_ab", json_number(s.margin_ab)},
                       {"margin_b", json_number(s.margin_b)}});
    return {{"status", std::string(to_string(c.status))},
            {"iterations", c.iterations},
            {"gap", json_number(c.gap)},
            {"tol", c.tol},
            {"residual_tol", c.residual_tol},
            {"p", vec_json(c.p)},
            {"q", vec_json(c.q)},
            {"r", vec_json(c.r)},
            {"fixed_point_residual", json_number(c.fixed_point_residual)},
            {"violation_iteration", c.violation_iteration},
            {"uniqueness", c.uniqueness},
            {"chain_log", log}};
}

json to_json(const RunReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    json out = {{"command", r.command},
                {"model_digest", r.model_digest},
                {"model_type", r.model_type},
                {"solver", to_json(r.solver)},
                {"seed", r.seed},
                {"checks", checks},
                {"files", r.files}};
    if (r.feedback) {
        out["feedback_signature"] = {{"deltas", r.feedback->deltas}, {"delta_product", r.feedback->delta_product}};
    } else if (!r.feedback_error.empty()) {
        out["feedback_signature"] = {{"error", r.feedback_error}};
    }
    out["certificate"] = r.certificate ? to_json(*r.certificate) : json(nullptr);
    for (auto it = r.extra.begin(); it != r.extra.end(); ++it) out[it.key()] = it.value();
    return out;
}

std::string format_csv_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

}  // namespace perifix
