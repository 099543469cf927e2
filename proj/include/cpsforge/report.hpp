#pragma once

// JSON and plain-text renderings of a PipelineReport. Symbolic entries use the
// canonical printed form; the canonical dump sorts keys and prints numbers with
// 12 significant digits so golden files compare byte for byte.

#include "cpsforge/cps.hpp"

#include <json.hpp>

#include <string>

namespace cpsforge {

[[nodiscard]] nlohmann::json report_json(const PipelineReport& r);
[[nodiscard]] nlohmann::json vector_json(const VectorReport& v, const NameTable& names);

[[nodiscard]] std::string canonical_dump(const nlohmann::json& j);

[[nodiscard]] std::string report_text(const PipelineReport& r);
// "ξ-invariant: yes; d̲-symmetry: yes" plus residuals and gauge obstructions.
[[nodiscard]] std::string vector_text(const VectorReport& v, const NameTable& names);

} // namespace cpsforge
