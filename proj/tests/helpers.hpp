#pragma once

#include <string>
#include <vector>

#include "perifix/expr.hpp"
#include "perifix/genereg.hpp"
#include "perifix/model.hpp"

namespace testing_util {

inline perifix::ClosedLoopModel make_model(double tau, const std::vector<std::string>& f,
                                           const std::vector<std::string>& h, perifix::Vec lo, perifix::Vec hi,
                                           std::vector<int> signs = {}) {
    std::vector<perifix::Expr> fe, he;
    for (const auto& s : f) fe.push_back(perifix::parse_expr(s));
    for (const auto& s : h) he.push_back(perifix::parse_expr(s));
    if (signs.empty()) signs.assign(f.size(), 1);
    perifix::OrthantCone k(signs);
    const auto u_cone = perifix::OrthantCone::positive(he.size());
    return perifix::ClosedLoopModel(tau, k, u_cone, std::move(fe), std::move(he),
                                    perifix::OrderInterval(k, std::move(lo), std::move(hi)));
}

inline perifix::ClosedLoopModel gene_model() { return perifix::build_gene_model(perifix::reference_gene_spec()); }

}  // namespace testing_util
