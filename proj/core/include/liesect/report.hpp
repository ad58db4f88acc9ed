#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "liesect/lie_algebra.hpp"
#include "liesect/verifier.hpp"

namespace liesect {

nlohmann::json to_json(const ResidualReport& report);
nlohmann::json to_json(const ClosureReport& report);
nlohmann::json to_json(const TransversalityReport& report);
nlohmann::json to_json(const StructureConstants& constants);
nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Matrix& m);

/// Stable serialization: two-space indent, trailing newline. Equal inputs give
/// byte-identical output.
std::string dump_json(const nlohmann::json& doc);

/// Aligned text table, one row per report.
std::string format_table(const std::vector<ResidualReport>& reports);

}  // namespace liesect
