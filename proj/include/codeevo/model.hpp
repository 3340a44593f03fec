#pragma once

#include <optional>
#include <string>
#include <vector>

#include "codeevo/infotheory.hpp"

namespace codeevo {

// Distribution over environment states.
struct EnvironmentSpec {
  std::vector<double> distribution;
  std::vector<std::string> labels;  // optional state names

  int states() const { return static_cast<int>(distribution.size()); }
};

EnvironmentSpec uniform_environment(int states);
void validate(const EnvironmentSpec& environment);

// Channel from environment states to sensor states: a row-stochastic
// table of p(y | mu) with one row per environment state.
struct SensorSpec {
  int env_states = 0;
  int sensor_states = 0;
  std::vector<double> table;  // env_states x sensor_states, row-major

  double operator()(int mu, int y) const {
    return table[static_cast<std::size_t>(mu) * sensor_states + y];
  }
};

void validate(const SensorSpec& sensor);

// Two independent bits, each flipped with probability epsilon.  The
// environment must have 2^bits states, enumerated with the first bit
// most significant; the sensor has the same number of states.
SensorSpec paired_binary_sensor(int bits, double epsilon);

// Symmetric noisy channel: correct state with probability 1 - epsilon,
// remaining mass spread evenly over the other states.
SensorSpec symmetric_noise_sensor(int states, double epsilon);

// A named sensor type defined by the set of environment states it can
// detect.
struct AgentType {
  std::string id;
  std::vector<int> region;  // zero-based environment state indices
};

// Binary sensor for a region type: y = 0 when the environment state lies
// in the type's region, y = 1 otherwise.  An empty region yields a blind
// sensor whose output is uniform noise.  A region covering every state
// is rejected: its output would be constant, which is almost certainly a
// misconfigured region rather than an intentional blind agent.
SensorSpec region_sensor(const AgentType& type, int env_states);

// Row-stochastic code table p(x | y).
struct Code {
  int sensor_states = 0;
  int output_states = 0;
  std::vector<double> table;  // sensor_states x output_states, row-major

  double operator()(int y, int x) const {
    return table[static_cast<std::size_t>(y) * output_states + x];
  }
};

void validate(const Code& code);
Code uniform_code(int sensor_states, int output_states);
Code identity_code(int states);

struct Agent {
  SensorSpec sensor;
  Code code;
  std::optional<std::string> type_id;
};

// Joint distribution over ordered speaker/listener pairs, stored as a
// dense matrix p(theta, theta').  Rows are speakers, columns listeners.
struct PopulationStructure {
  int agent_count = 0;
  std::vector<double> pair_probabilities;  // agent_count x agent_count

  double operator()(int i, int j) const {
    return pair_probabilities[static_cast<std::size_t>(i) * agent_count + j];
  }
};

void validate(const PopulationStructure& structure);

// Every ordered pair equally likely, including self pairs.
PopulationStructure well_mixed_structure(int agent_count);

// Agents on a width x height grid; equal probability on every ordered
// pair of 4-neighbours and on every self pair.
PopulationStructure grid_structure(int width, int height);

// Full population: environment, one agent per index, and a pair
// distribution.  All agents share the same output alphabet size and
// sense the same environment.
struct PopulationModel {
  EnvironmentSpec environment;
  std::vector<Agent> agents;
  PopulationStructure structure;
  int output_states = 0;
};

void validate(const PopulationModel& model);

// Exact joint over (theta, theta_p, mu, y, y_p, x, x_p) built from the
// model's factorization.  Intended for audits and small models; the
// objective functions below avoid materializing it.
JointTable build_joint(const PopulationModel& model);

// I(X ; X') between speaker output and listener output.
double code_similarity(const PopulationModel& model);

// I(Y ; Y') between speaker percept and listener percept.  When all
// agents share one sensor this bounds code_similarity from above.
double similarity_bound(const PopulationModel& model);

// I(mu ; Y, X') between the environment and what a pair jointly holds:
// the speaker's percept together with the listener's decoded output.
double env_info_pair(const PopulationModel& model);

// I(mu ; X, X') between the environment and the outputs alone.
double blind_info(const PopulationModel& model);

// I(mu ; Y_theta) for one agent's sensor.
double agent_env_info(const PopulationModel& model, int agent);

// I(mu ; X_theta) for one agent's full perception chain.
double agent_output_info(const PopulationModel& model, int agent);

// Marginal over (mu, x, x') implied by the model; exposed because the
// analysis layer reuses it for concept extraction.
JointTable output_pair_joint(const PopulationModel& model);

// Marginal over (mu, y, y').
JointTable sensor_pair_joint(const PopulationModel& model);

// Marginal over (mu, y, x').
JointTable perception_pair_joint(const PopulationModel& model);

}  // namespace codeevo
