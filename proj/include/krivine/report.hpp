#pragma once

#include <json.hpp>

#include "krivine/problems.hpp"
#include "krivine/rounding.hpp"
#include "krivine/series.hpp"
#include "krivine/validator.hpp"

namespace krivine {

inline constexpr const char* kSchemaVersion = "krivine-report/1";
inline constexpr const char* kLibraryVersion = "0.1.0";

// Every report shares the envelope {schema, version, command, config, ...}
// so any number in it can be regenerated from the echoed configuration.
nlohmann::json report_envelope(const std::string& command, const nlohmann::json& config);

nlohmann::json to_json(const CoefficientTable& table);
nlohmann::json to_json(const InverseTable& inv);
nlohmann::json to_json(const KrivineScheme& scheme);
nlohmann::json to_json(const SignAssignment& signs);
nlohmann::json to_json(const RoundingReport& report);
nlohmann::json to_json(const McEstimate& est);
nlohmann::json to_json(const TrendRow& row);
nlohmann::json to_json(const std::vector<TrendRow>& rows);
nlohmann::json matrix_to_json(const Matrix& mat);

} // namespace krivine
