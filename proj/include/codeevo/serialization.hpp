#pragma once

#include <string>

#include <json.hpp>

#include "codeevo/model.hpp"

namespace codeevo {

// Complete, self-contained description of a model: loading the result
// reproduces every distribution bit for bit, so downstream analysis can
// run without the original configuration.
nlohmann::json serialize_model(const PopulationModel& model);
PopulationModel deserialize_model(const nlohmann::json& document);

void save_model(const PopulationModel& model, const std::string& path);
PopulationModel load_model(const std::string& path);

}  // namespace codeevo
