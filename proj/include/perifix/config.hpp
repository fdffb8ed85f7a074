#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "perifix/genereg.hpp"
#include "perifix/model.hpp"

namespace perifix {

// Validated model document. `gene` is set for documents of type "gene".
struct ModelDocument {
    std::string type;
    ClosedLoopModel model;
    std::optional<GeneSpec> gene;
};

// Schema:
//   type: "closed_loop" | "gene"; n: int; m: int (default 1); period: real
//   f: [n exprs], h: [m exprs]            (closed_loop)
//   alpha: [n exprs], g: expr             (gene)
//   state_box: {lo: [n], hi: [n]}         (required for closed_loop)
//   cone: [n of +1/-1]                    (default all +1)
// Unknown keys are rejected. All failures throw ModelError with a field path.
ModelDocument load_model_document(const nlohmann::json& doc);
ModelDocument load_model_text(std::string_view text);
ModelDocument load_model_file(const std::filesystem::path& path);

ClosedLoopModel load_model(const nlohmann::json& doc);

}  // namespace perifix
