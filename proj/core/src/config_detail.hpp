#pragma once

#include <string>

#include "json.hpp"
#include "tactbci/config.hpp"

// Shared between config.cpp and session_io.cpp; not installed.
namespace tactbci::detail {

nlohmann::json config_to_json(const Config& config);

// Parses a whole config object: defaults, unknown-key rejection, validation.
Config config_from_json(const nlohmann::json& j);

// Sets one dotted key without validating the result.
void set_config_key(Config& config, const std::string& key, const nlohmann::json& value);

}  // namespace tactbci::detail
