#ifndef PCBOUNDS_SCENARIO_IO_HPP
#define PCBOUNDS_SCENARIO_IO_HPP

// JSON scenario documents and JSON renderings of results.
//
// Scenario document (unknown keys are rejected):
//
//   {"kind": "simple",   "T": 2, "t": 1,
//    "p_y_given_d": [[...T+1 values for D=0...], [...for D=1...]]}
//
//   {"kind": "mediator", "T": 2, "t": 1,
//    "p_m_given_d": [[P(M=0|D=0), P(M=1|D=0)], [P(M=0|D=1), P(M=1|D=1)]],
//    "p_y_given_m": [[...T+1 values for M=0...], [...for M=1...]]}

#include <filesystem>
#include <string_view>

#include "json.hpp"

#include "pcbounds/bounds.hpp"
#include "pcbounds/core_model.hpp"
#include "pcbounds/oracle.hpp"

namespace pcbounds {

/// Parses and validates a scenario document.
Scenario parse_scenario_document(const nlohmann::json& doc);
Scenario parse_scenario_document(std::string_view text);
Scenario load_scenario_document(const std::filesystem::path& path);

nlohmann::json to_document(const Scenario& scenario);

nlohmann::json to_json(const BoundInterval& interval);
nlohmann::json to_json(const DominanceReport& report);
nlohmann::json to_json(const CounterfactualJoint& joint);
nlohmann::json to_json(const Envelope& envelope);

/// {"error": "<code>", "message": "..."}
nlohmann::json error_json(const Error& error);

}  // namespace pcbounds

#endif  // PCBOUNDS_SCENARIO_IO_HPP
