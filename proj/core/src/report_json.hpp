#pragma once

#include "nilflow/io.hpp"

#include "json.hpp"

namespace nilflow {

nlohmann::ordered_json to_json(const DiagnosticsRecord& r);
nlohmann::ordered_json to_json(const ConsistencyReport& r);
nlohmann::ordered_json to_json(const BlowdownResidual& r);
nlohmann::ordered_json to_json(const AuditReport& r);
nlohmann::ordered_json to_json(const RigidityReport& r);

}  // namespace nilflow
