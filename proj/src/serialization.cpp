#include "codeevo/serialization.hpp"

#include <fstream>
#include <stdexcept>

namespace codeevo {

namespace {

using nlohmann::json;

json rows_to_json(const std::vector<double>& table, int rows, int cols) {
  json out = json::array();
  for (int r = 0; r < rows; ++r) {
    json row = json::array();
    for (int c = 0; c < cols; ++c) {
      row.push_back(table[static_cast<std::size_t>(r) * cols + c]);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> rows_from_json(const json& array, int rows, int cols,
                                   const std::string& what) {
  if (!array.is_array() || array.size() != static_cast<std::size_t>(rows)) {
    throw std::invalid_argument("model file: " + what + " must have " +
                                std::to_string(rows) + " rows");
  }
  std::vector<double> table;
  table.reserve(static_cast<std::size_t>(rows) * cols);
  for (const json& row : array) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(cols)) {
      throw std::invalid_argument("model file: " + what + " rows must have " +
                                  std::to_string(cols) + " entries");
    }
    for (const json& v : row) {
      if (!v.is_number()) {
        throw std::invalid_argument("model file: " + what + " entries must be numbers");
      }
      table.push_back(v.get<double>());
    }
  }
  return table;
}

}  // namespace

json serialize_model(const PopulationModel& model) {
  validate(model);
  json document;
  document["environment"] = {
      {"distribution", model.environment.distribution},
  };
  if (!model.environment.labels.empty()) {
    document["environment"]["labels"] = model.environment.labels;
  }
  document["output_states"] = model.output_states;

  json agents = json::array();
  for (const Agent& agent : model.agents) {
    json entry;
    entry["sensor"] = {
        {"states", agent.sensor.sensor_states},
        {"table", rows_to_json(agent.sensor.table, agent.sensor.env_states,
                               agent.sensor.sensor_states)},
    };
    entry["code"] = rows_to_json(agent.code.table, agent.code.sensor_states,
                                 agent.code.output_states);
    if (agent.type_id) entry["type"] = *agent.type_id;
    agents.push_back(std::move(entry));
  }
  document["agents"] = std::move(agents);

  document["structure"] = rows_to_json(model.structure.pair_probabilities,
                                       model.structure.agent_count,
                                       model.structure.agent_count);
  return document;
}

PopulationModel deserialize_model(const json& document) {
  if (!document.is_object()) {
    throw std::invalid_argument("model file: document must be an object");
  }
  for (const char* key : {"environment", "output_states", "agents", "structure"}) {
    if (!document.contains(key)) {
      throw std::invalid_argument(std::string("model file: missing \"") + key + "\"");
    }
  }

  PopulationModel model;
  const json& env = document.at("environment");
  if (!env.is_object() || !env.contains("distribution") ||
      !env.at("distribution").is_array()) {
    throw std::invalid_argument("model file: environment.distribution must be an array");
  }
  model.environment.distribution = env.at("distribution").get<std::vector<double>>();
  if (env.contains("labels")) {
    model.environment.labels = env.at("labels").get<std::vector<std::string>>();
  }
  const int env_states = model.environment.states();

  if (!document.at("output_states").is_number_integer()) {
    throw std::invalid_argument("model file: output_states must be an integer");
  }
  model.output_states = document.at("output_states").get<int>();

  if (!document.at("agents").is_array() || document.at("agents").empty()) {
    throw std::invalid_argument("model file: agents must be a non-empty array");
  }
  for (const json& entry : document.at("agents")) {
    if (!entry.is_object() || !entry.contains("sensor") || !entry.contains("code")) {
      throw std::invalid_argument("model file: each agent needs a sensor and a code");
    }
    Agent agent;
    const json& sensor = entry.at("sensor");
    if (!sensor.is_object() || !sensor.contains("states") ||
        !sensor.at("states").is_number_integer()) {
      throw std::invalid_argument("model file: sensor.states must be an integer");
    }
    agent.sensor.env_states = env_states;
    agent.sensor.sensor_states = sensor.at("states").get<int>();
    agent.sensor.table = rows_from_json(sensor.at("table"), env_states,
                                        agent.sensor.sensor_states, "sensor table");
    agent.code.sensor_states = agent.sensor.sensor_states;
    agent.code.output_states = model.output_states;
    agent.code.table = rows_from_json(entry.at("code"), agent.code.sensor_states,
                                      model.output_states, "code");
    if (entry.contains("type")) agent.type_id = entry.at("type").get<std::string>();
    model.agents.push_back(std::move(agent));
  }

  const int n = static_cast<int>(model.agents.size());
  model.structure.agent_count = n;
  model.structure.pair_probabilities =
      rows_from_json(document.at("structure"), n, n, "structure");

  validate(model);
  return model;
}

void save_model(const PopulationModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write model file: " + path);
  }
  out << serialize_model(model).dump(1) << "\n";
}

PopulationModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open model file: " + path);
  }
  json document;
  try {
    in >> document;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("cannot parse " + path + ": " + e.what());
  }
  return deserialize_model(document);
}

}  // namespace codeevo
