#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "aqnbf/aqset.hpp"
#include "aqnbf/behavior.hpp"
#include "aqnbf/nbf.hpp"
#include "aqnbf/seesaw.hpp"

namespace aqnbf {

/// "collins_gisin" entries are basis monomials; "full" entries carry one
/// letter per party and stand for the joint event (a⃗|x⃗).
enum class TableFormat { CollinsGisin, Full };

nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

nlohmann::json functional_to_json(const BellFunctional& f, TableFormat format = TableFormat::CollinsGisin);
/// Missing entries count as zero. Throws ParseError on malformed input.
BellFunctional functional_from_json(const nlohmann::json& j);

nlohmann::json behavior_to_json(const Behavior& b, TableFormat format = TableFormat::Full);
/// Every entry of the chosen format must be present.
Behavior behavior_from_json(const nlohmann::json& j, const ToleranceConfig& tol = {});

/// Ordered dump of the class partition: word, member cells, basis index.
nlohmann::json word_classes_to_json(const MomentStructure& structure);

/// Gram matrix as upper-triangle sdp triplets, with the certified target
/// coefficients and bound.
nlohmann::json certificate_to_json(const SosCertificate& cert, const Scenario& scenario);
SosCertificate certificate_from_json(const nlohmann::json& j, Scenario* scenario = nullptr);

nlohmann::json state_to_json(const SeesawState& st);
/// Per-restart sweep values plus the best blocks and behavior.
nlohmann::json trace_to_json(const SeesawTrace& trace);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace aqnbf
