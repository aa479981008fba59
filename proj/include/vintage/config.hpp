#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "vintage/model.hpp"

namespace vintage {

/// Strict JSON reader for ModelConfig. Unknown keys and wrong types raise ConfigError.
ModelConfig parse_config(const nlohmann::json& j);
ModelConfig parse_config_text(const std::string& text);
ModelConfig load_config_file(const std::string& path);

nlohmann::json config_to_json(const ModelConfig& config);

/// Resolves a canonical instance name or a path to a JSON config.
VintageModel load_model(const std::string& name_or_path, int n_cells = 200);

}  // namespace vintage
