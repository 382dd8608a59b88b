#pragma once

#include <json.hpp>

#include "trmei/optimizer.hpp"

namespace trmei {

// Configuration JSON. Missing keys keep the value already in `base`;
// unknown keys are rejected with InputError.
nlohmann::json config_to_json(const OptimizerConfig& config);
OptimizerConfig config_from_json(const nlohmann::json& j, OptimizerConfig base = {});

nlohmann::json trace_to_json(const RunTrace& trace);

}  // namespace trmei
