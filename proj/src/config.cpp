#include "codeevo/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

namespace codeevo {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("config: " + message);
}

void check_keys(const json& object, const std::string& where,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : object.items()) {
    (void)value;
    if (!allowed.count(key)) {
      fail("unknown key \"" + key + "\" in " + where);
    }
  }
}

template <typename T>
T get_number(const json& object, const std::string& where, const std::string& key,
             T fallback) {
  if (!object.contains(key)) return fallback;
  const json& v = object.at(key);
  if (!v.is_number()) fail(where + "." + key + " must be a number");
  return v.get<T>();
}

std::string get_string(const json& object, const std::string& where,
                       const std::string& key) {
  if (!object.contains(key) || !object.at(key).is_string()) {
    fail(where + "." + key + " must be a string");
  }
  return object.at(key).get<std::string>();
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::well_mixed: return "well_mixed";
    case ScenarioKind::grid: return "grid";
    case ScenarioKind::flexible: return "flexible";
    case ScenarioKind::heterogeneous: return "heterogeneous";
  }
  throw std::logic_error("unreachable scenario kind");
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  if (name == "well_mixed") return ScenarioKind::well_mixed;
  if (name == "grid") return ScenarioKind::grid;
  if (name == "flexible") return ScenarioKind::flexible;
  if (name == "heterogeneous") return ScenarioKind::heterogeneous;
  fail("unknown scenario \"" + name +
       "\"; expected well_mixed, grid, flexible or heterogeneous");
}

std::string to_string(SensorTemplate sensor_template) {
  switch (sensor_template) {
    case SensorTemplate::paired_binary: return "paired_binary";
    case SensorTemplate::symmetric: return "symmetric";
    case SensorTemplate::regions: return "regions";
  }
  throw std::logic_error("unreachable sensor template");
}

int ScenarioConfig::agent_count() const {
  switch (scenario) {
    case ScenarioKind::grid:
      return grid_width * grid_height;
    case ScenarioKind::heterogeneous: {
      int total = 0;
      for (const TypeSpec& t : types) total += t.count;
      return total;
    }
    default:
      return agents;
  }
}

int ScenarioConfig::effective_restarts() const {
  if (optimizer.restarts > 0) return optimizer.restarts;
  return scenario == ScenarioKind::heterogeneous ? 10 : 3;
}

ScenarioConfig parse_config(const json& document) {
  if (!document.is_object()) fail("document must be an object");
  check_keys(document, "document",
             {"scenario", "agents", "grid", "environment", "sensors", "outputs",
              "optimizer", "analysis", "seed", "output_dir"});

  ScenarioConfig config;
  if (!document.contains("scenario")) fail("missing \"scenario\"");
  config.scenario = parse_scenario_kind(get_string(document, "document", "scenario"));

  if (document.contains("agents")) {
    config.agents = get_number<int>(document, "document", "agents", 0);
  }
  if (document.contains("grid")) {
    const json& grid = document.at("grid");
    if (!grid.is_object()) fail("\"grid\" must be an object");
    check_keys(grid, "grid", {"width", "height"});
    config.grid_width = get_number<int>(grid, "grid", "width", 0);
    config.grid_height = get_number<int>(grid, "grid", "height", 0);
  }

  if (!document.contains("environment")) fail("missing \"environment\"");
  {
    const json& env = document.at("environment");
    if (!env.is_object()) fail("\"environment\" must be an object");
    check_keys(env, "environment", {"states", "distribution", "labels"});
    config.env_states = get_number<int>(env, "environment", "states", 0);
    if (config.env_states < 2) fail("environment.states must be at least 2");
    if (env.contains("distribution")) {
      if (!env.at("distribution").is_array()) {
        fail("environment.distribution must be an array");
      }
      config.env_distribution = env.at("distribution").get<std::vector<double>>();
      if (config.env_distribution.size() !=
          static_cast<std::size_t>(config.env_states)) {
        fail("environment.distribution length must equal environment.states");
      }
    }
    if (env.contains("labels")) {
      if (!env.at("labels").is_array()) fail("environment.labels must be an array");
      config.env_labels = env.at("labels").get<std::vector<std::string>>();
      if (config.env_labels.size() != static_cast<std::size_t>(config.env_states)) {
        fail("environment.labels length must equal environment.states");
      }
    }
  }

  if (!document.contains("sensors")) fail("missing \"sensors\"");
  {
    const json& sensors = document.at("sensors");
    if (!sensors.is_object()) fail("\"sensors\" must be an object");
    check_keys(sensors, "sensors", {"template", "epsilon", "bits", "types"});
    const std::string name = get_string(sensors, "sensors", "template");
    if (name == "paired_binary") {
      config.sensor_template = SensorTemplate::paired_binary;
    } else if (name == "symmetric") {
      config.sensor_template = SensorTemplate::symmetric;
    } else if (name == "regions") {
      config.sensor_template = SensorTemplate::regions;
    } else {
      fail("unknown sensor template \"" + name +
           "\"; expected paired_binary, symmetric or regions");
    }
    config.epsilon = get_number<double>(sensors, "sensors", "epsilon", 0.01);
    if (config.epsilon < 0.0 || config.epsilon > 1.0) {
      fail("sensors.epsilon must lie in [0, 1]");
    }
    config.sensor_bits = get_number<int>(sensors, "sensors", "bits", 0);
    if (sensors.contains("types")) {
      if (!sensors.at("types").is_array()) fail("sensors.types must be an array");
      for (const json& t : sensors.at("types")) {
        if (!t.is_object()) fail("each sensor type must be an object");
        check_keys(t, "sensors.types[]", {"id", "region", "count"});
        TypeSpec spec;
        spec.id = get_string(t, "sensors.types[]", "id");
        if (t.contains("region")) {
          if (!t.at("region").is_array()) {
            fail("type " + spec.id + ": region must be an array");
          }
          spec.region = t.at("region").get<std::vector<int>>();
        }
        spec.count = get_number<int>(t, "sensors.types[]", "count", 0);
        if (spec.count < 1) fail("type " + spec.id + ": count must be positive");
        for (int state : spec.region) {
          if (state < 1 || state > config.env_states) {
            fail("type " + spec.id + ": region states are one-based and must lie in [1, " +
                 std::to_string(config.env_states) + "]");
          }
        }
        config.types.push_back(std::move(spec));
      }
    }
  }

  if (!document.contains("outputs")) fail("missing \"outputs\"");
  config.outputs = get_number<int>(document, "document", "outputs", 0);
  if (config.outputs < 2) fail("outputs must be at least 2");

  if (document.contains("optimizer")) {
    const json& opt = document.at("optimizer");
    if (!opt.is_object()) fail("\"optimizer\" must be an object");
    check_keys(opt, "optimizer",
               {"max_evaluations", "population_size", "initial_step", "restarts",
                "bound_tolerance", "stagnation_generations", "stagnation_tolerance"});
    OptimizerSettings& s = config.optimizer;
    s.max_evaluations = get_number<long>(opt, "optimizer", "max_evaluations",
                                         s.max_evaluations);
    s.population_size = get_number<int>(opt, "optimizer", "population_size",
                                        s.population_size);
    s.initial_step = get_number<double>(opt, "optimizer", "initial_step",
                                        s.initial_step);
    s.restarts = get_number<int>(opt, "optimizer", "restarts", s.restarts);
    s.bound_tolerance = get_number<double>(opt, "optimizer", "bound_tolerance",
                                           s.bound_tolerance);
    s.stagnation_generations = get_number<int>(opt, "optimizer",
                                               "stagnation_generations",
                                               s.stagnation_generations);
    s.stagnation_tolerance = get_number<double>(opt, "optimizer",
                                                "stagnation_tolerance",
                                                s.stagnation_tolerance);
    if (s.max_evaluations < 1) fail("optimizer.max_evaluations must be positive");
    if (s.initial_step <= 0.0) fail("optimizer.initial_step must be positive");
    if (s.restarts < 0) fail("optimizer.restarts must be non-negative");
    if (s.bound_tolerance < 0.0) fail("optimizer.bound_tolerance must be non-negative");
  }

  if (document.contains("analysis")) {
    const json& a = document.at("analysis");
    if (!a.is_object()) fail("\"analysis\" must be an object");
    check_keys(a, "analysis", {"cluster_tolerance", "structure_threshold"});
    config.analysis.cluster_tolerance =
        get_number<double>(a, "analysis", "cluster_tolerance",
                           config.analysis.cluster_tolerance);
    config.analysis.structure_threshold =
        get_number<double>(a, "analysis", "structure_threshold",
                           config.analysis.structure_threshold);
    if (config.analysis.cluster_tolerance < 0.0) {
      fail("analysis.cluster_tolerance must be non-negative");
    }
  }

  config.seed = get_number<std::uint64_t>(document, "document", "seed", config.seed);
  if (document.contains("output_dir")) {
    config.output_dir = get_string(document, "document", "output_dir");
  }

  // Scenario-specific shape checks.
  switch (config.scenario) {
    case ScenarioKind::well_mixed:
    case ScenarioKind::flexible:
      if (config.agents < 2) fail("scenario needs \"agents\" of at least 2");
      if (config.grid_width || config.grid_height) {
        fail("\"grid\" only applies to the grid scenario");
      }
      break;
    case ScenarioKind::grid:
      if (config.grid_width < 1 || config.grid_height < 1) {
        fail("grid scenario needs positive grid.width and grid.height");
      }
      if (config.grid_width * config.grid_height < 2) {
        fail("grid scenario needs at least 2 agents");
      }
      if (config.agents && config.agents != config.grid_width * config.grid_height) {
        fail("\"agents\" disagrees with the grid dimensions");
      }
      break;
    case ScenarioKind::heterogeneous:
      if (config.types.empty()) {
        fail("heterogeneous scenario needs sensors.types");
      }
      if (config.agents && config.agents != config.agent_count()) {
        fail("\"agents\" disagrees with the type counts");
      }
      break;
  }

  if (config.scenario == ScenarioKind::heterogeneous) {
    if (config.sensor_template != SensorTemplate::regions) {
      fail("heterogeneous scenario requires the regions sensor template");
    }
  } else if (config.sensor_template == SensorTemplate::regions) {
    fail("the regions sensor template requires the heterogeneous scenario");
  }

  if (config.sensor_template == SensorTemplate::paired_binary) {
    if (config.sensor_bits < 1) fail("paired_binary sensors need \"bits\"");
    if ((1 << config.sensor_bits) != config.env_states) {
      fail("paired_binary sensors need environment.states == 2^bits");
    }
  } else if (config.sensor_bits != 0) {
    fail("sensors.bits only applies to the paired_binary template");
  }

  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  json document;
  try {
    in >> document;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("cannot parse " + path + ": " + e.what());
  }
  return parse_config(document);
}

PopulationModel build_template(const ScenarioConfig& config) {
  PopulationModel model;
  if (config.env_distribution.empty()) {
    model.environment = uniform_environment(config.env_states);
  } else {
    model.environment.distribution = config.env_distribution;
  }
  if (config.env_labels.empty()) {
    for (int i = 0; i < config.env_states; ++i) {
      model.environment.labels.push_back(std::to_string(i + 1));
    }
  } else {
    model.environment.labels = config.env_labels;
  }
  validate(model.environment);

  model.output_states = config.outputs;

  const int n = config.agent_count();
  switch (config.sensor_template) {
    case SensorTemplate::paired_binary: {
      const SensorSpec sensor = paired_binary_sensor(config.sensor_bits, config.epsilon);
      Agent agent;
      agent.sensor = sensor;
      agent.code = uniform_code(sensor.sensor_states, config.outputs);
      model.agents.assign(static_cast<std::size_t>(n), agent);
      break;
    }
    case SensorTemplate::symmetric: {
      const SensorSpec sensor = symmetric_noise_sensor(config.env_states, config.epsilon);
      Agent agent;
      agent.sensor = sensor;
      agent.code = uniform_code(sensor.sensor_states, config.outputs);
      model.agents.assign(static_cast<std::size_t>(n), agent);
      break;
    }
    case SensorTemplate::regions: {
      for (const TypeSpec& spec : config.types) {
        AgentType type;
        type.id = spec.id;
        for (int state : spec.region) type.region.push_back(state - 1);
        const SensorSpec sensor = region_sensor(type, config.env_states);
        Agent agent;
        agent.sensor = sensor;
        agent.code = uniform_code(sensor.sensor_states, config.outputs);
        agent.type_id = spec.id;
        for (int k = 0; k < spec.count; ++k) model.agents.push_back(agent);
      }
      break;
    }
  }

  switch (config.scenario) {
    case ScenarioKind::grid:
      model.structure = grid_structure(config.grid_width, config.grid_height);
      break;
    default:
      model.structure = well_mixed_structure(n);
      break;
  }

  validate(model);
  return model;
}

ParamCodec codec_for(const ScenarioConfig& config, const PopulationModel& reference) {
  if (config.scenario == ScenarioKind::flexible) {
    return ParamCodec::codes_and_structure(reference);
  }
  return ParamCodec::codes_only(reference);
}

}  // namespace codeevo
