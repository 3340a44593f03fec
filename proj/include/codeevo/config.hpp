#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "codeevo/model.hpp"
#include "codeevo/optim.hpp"

namespace codeevo {

enum class ScenarioKind { well_mixed, grid, flexible, heterogeneous };

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& name);

enum class SensorTemplate { paired_binary, symmetric, regions };

std::string to_string(SensorTemplate sensor_template);

// Sensor type as written in configuration files: region states are
// one-based there, matching the usual presentation of the environment.
struct TypeSpec {
  std::string id;
  std::vector<int> region;  // one-based environment states
  int count = 0;
};

struct OptimizerSettings {
  long max_evaluations = 200000;
  int population_size = 0;  // 0 selects the dimension-based default
  double initial_step = 0.3;
  int restarts = 0;  // 0 selects the scenario default
  // A restart stopping within this distance of the percept-level bound
  // counts as converged; later restarts are skipped.
  double bound_tolerance = 1e-6;
  int stagnation_generations = 200;
  double stagnation_tolerance = 1e-9;
};

struct AnalysisSettings {
  double cluster_tolerance = 1e-3;
  double structure_threshold = 1e-4;
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::well_mixed;
  int agents = 0;
  int grid_width = 0;
  int grid_height = 0;

  int env_states = 0;
  std::vector<double> env_distribution;  // empty selects uniform
  std::vector<std::string> env_labels;   // empty selects "1", "2", ...

  SensorTemplate sensor_template = SensorTemplate::paired_binary;
  double epsilon = 0.01;
  int sensor_bits = 0;  // paired_binary only
  std::vector<TypeSpec> types;

  int outputs = 0;

  OptimizerSettings optimizer;
  AnalysisSettings analysis;

  std::uint64_t seed = 1;
  std::string output_dir;

  int agent_count() const;
  int effective_restarts() const;
};

ScenarioConfig parse_config(const nlohmann::json& document);
ScenarioConfig load_config(const std::string& path);

// Model with the configured environment, sensors and structure, and
// uniform codes as the optimization starting shape.
PopulationModel build_template(const ScenarioConfig& config);

// Codes only, except for the flexible scenario, which also optimizes
// the pair structure.
ParamCodec codec_for(const ScenarioConfig& config, const PopulationModel& reference);

}  // namespace codeevo
