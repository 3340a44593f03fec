#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "codeevo/model.hpp"

namespace codeevo {

// Maps an unconstrained real vector onto a population model.  Each code
// row is a softmax over a block of output_states parameters; when the
// pair structure is included, one softmax over all agent_count^2
// parameters follows the code blocks.
class ParamCodec {
 public:
  static ParamCodec codes_only(const PopulationModel& reference);
  static ParamCodec codes_and_structure(const PopulationModel& reference);

  int dimension() const { return dimension_; }
  bool includes_structure() const { return includes_structure_; }

  // Overwrites the model's code tables (and pair structure, when
  // included) from the parameter vector.  The model must have the same
  // shape as the reference the codec was built from.
  void apply(std::span<const double> parameters, PopulationModel& model) const;

  PopulationModel decode(std::span<const double> parameters) const;

 private:
  ParamCodec(const PopulationModel& reference, bool includes_structure);

  PopulationModel reference_;
  int dimension_ = 0;
  bool includes_structure_ = false;
};

struct CmaEsConfig {
  int dimension = 0;
  int population_size = 0;  // 0 selects 4 + floor(3 ln dimension)
  double initial_step = 0.3;
  long max_evaluations = 100000;
  // Stop once the best value reaches target_value - target_tolerance.
  std::optional<double> target_value;
  double target_tolerance = 0.0;
  // Stop when the best value has improved by less than
  // stagnation_tolerance over this many consecutive generations.
  int stagnation_generations = 200;
  double stagnation_tolerance = 1e-9;
  std::uint64_t seed = 0;
};

struct GenerationRecord {
  long generation = 0;
  double best_so_far = 0.0;
  double mean_fitness = 0.0;
  double step_size = 0.0;
};

struct OptimizationTrace {
  std::vector<GenerationRecord> generations;
  std::vector<double> best_parameters;
  double best_value = 0.0;
  // First candidate sampled in the first generation; records where the
  // search started in parameter space.
  std::vector<double> initial_parameters;
  long evaluations = 0;
  std::string stop_reason;
};

using Objective = std::function<double(std::span<const double>)>;

// Covariance matrix adaptation evolution strategy, maximizing.  Only the
// ranking of fitness values influences the search distribution, so any
// strictly increasing transformation of the objective yields the same
// sampled populations.  Throws when the objective returns a non-finite
// value.
OptimizationTrace cma_es_maximize(const Objective& objective, const CmaEsConfig& config);

struct ScenarioResult {
  PopulationModel initial_model;
  PopulationModel final_model;
  OptimizationTrace trace;
};

// Maximizes code_similarity over the codec's parameter space, starting
// from the reference model baked into the codec.
ScenarioResult optimize_scenario(const ParamCodec& codec, const CmaEsConfig& config);

}  // namespace codeevo
