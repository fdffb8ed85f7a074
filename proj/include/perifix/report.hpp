#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "perifix/certify.hpp"
#include "perifix/check.hpp"
#include "perifix/integrate.hpp"
#include "perifix/model.hpp"

namespace perifix {

// Everything needed to rerun a CLI command and compare verdicts.
struct RunReport {
    std::string command;
    std::string model_digest;
    std::string model_type;
    IntegratorSettings solver;
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;
    std::optional<FeedbackSignature> feedback;
    std::string feedback_error;
    std::optional<ConvergenceCertificate> certificate;
    std::vector<std::string> files;
    nlohmann::json extra = nlohmann::json::object();
};

// "fnv1a64:<16 hex digits>" of the bytes.
std::string content_digest(std::string_view bytes);

// Finite doubles become numbers, +-inf the strings "inf"/"-inf", NaN null.
nlohmann::json json_number(double v);

nlohmann::json to_json(const IntegratorSettings& s);
nlohmann::json to_json(const CheckResult& c);
nlohmann::json to_json(const ConvergenceCertificate& c);
nlohmann::json to_json(const RunReport& r);

// 17 significant digits with '.' as decimal separator, whatever the global locale.
std::string format_csv_number(double v);

}  // namespace perifix
