#include "codeevo/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace codeevo {

namespace {

void check_row_stochastic(const std::vector<double>& table, int rows, int cols,
                          const std::string& what) {
  if (table.size() != static_cast<std::size_t>(rows) * cols) {
    throw std::invalid_argument(what + " table size does not match its dimensions");
  }
  for (int r = 0; r < rows; ++r) {
    double total = 0.0;
    for (int c = 0; c < cols; ++c) {
      const double p = table[static_cast<std::size_t>(r) * cols + c];
      if (p < 0.0 || !std::isfinite(p)) {
        throw std::invalid_argument(what + " entries must be finite and non-negative");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
      throw std::invalid_argument(what + " rows must each sum to one");
    }
  }
}

// Per-agent channel from environment states straight to outputs:
// M(mu, x) = sum_y p(y | mu) p(x | y).
std::vector<double> mixing_table(const Agent& agent) {
  const SensorSpec& s = agent.sensor;
  const Code& c = agent.code;
  std::vector<double> m(static_cast<std::size_t>(s.env_states) * c.output_states, 0.0);
  for (int mu = 0; mu < s.env_states; ++mu) {
    for (int y = 0; y < s.sensor_states; ++y) {
      const double sp = s(mu, y);
      if (sp == 0.0) continue;
      for (int x = 0; x < c.output_states; ++x) {
        m[static_cast<std::size_t>(mu) * c.output_states + x] += sp * c(y, x);
      }
    }
  }
  return m;
}

// Joint over (mu, a, b) where a is drawn from the speaker's channel and
// b from the listener's, both conditioned on mu, averaged over the pair
// distribution.  Channel tables are env_states x states_{a,b} per agent.
JointTable pair_channel_joint(const PopulationModel& model,
                              const std::vector<std::vector<double>>& speaker_channels,
                              int speaker_states, const std::string& speaker_name,
                              const std::vector<std::vector<double>>& listener_channels,
                              int listener_states, const std::string& listener_name) {
  const int env_states = model.environment.states();
  const int n = model.structure.agent_count;
  std::vector<double> joint(
      static_cast<std::size_t>(env_states) * speaker_states * listener_states, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double w = model.structure(i, j);
      if (w == 0.0) continue;
      const std::vector<double>& a = speaker_channels[i];
      const std::vector<double>& b = listener_channels[j];
      for (int mu = 0; mu < env_states; ++mu) {
        const double c = w * model.environment.distribution[mu];
        if (c == 0.0) continue;
        double* out = joint.data() +
                      static_cast<std::size_t>(mu) * speaker_states * listener_states;
        const double* arow = a.data() + static_cast<std::size_t>(mu) * speaker_states;
        const double* brow = b.data() + static_cast<std::size_t>(mu) * listener_states;
        for (int sa = 0; sa < speaker_states; ++sa) {
          const double scale = c * arow[sa];
          if (scale == 0.0) continue;
          double* cell = out + static_cast<std::size_t>(sa) * listener_states;
          for (int sb = 0; sb < listener_states; ++sb) {
            cell[sb] += scale * brow[sb];
          }
        }
      }
    }
  }
  std::vector<Variable> vars{
      make_variable("mu", env_states, model.environment.labels),
      make_variable(speaker_name, speaker_states),
      make_variable(listener_name, listener_states)};
  return JointTable(std::move(vars), std::move(joint));
}

std::vector<std::vector<double>> all_mixing_tables(const PopulationModel& model) {
  std::vector<std::vector<double>> tables;
  tables.reserve(model.agents.size());
  for (const auto& agent : model.agents) tables.push_back(mixing_table(agent));
  return tables;
}

std::vector<std::vector<double>> all_sensor_tables(const PopulationModel& model) {
  std::vector<std::vector<double>> tables;
  tables.reserve(model.agents.size());
  for (const auto& agent : model.agents) tables.push_back(agent.sensor.table);
  return tables;
}

}  // namespace

EnvironmentSpec uniform_environment(int states) {
  if (states < 1) {
    throw std::invalid_argument("environment must have at least one state");
  }
  EnvironmentSpec env;
  env.distribution.assign(static_cast<std::size_t>(states), 1.0 / states);
  return env;
}

void validate(const EnvironmentSpec& environment) {
  if (environment.distribution.empty()) {
    throw std::invalid_argument("environment must have at least one state");
  }
  double total = 0.0;
  for (double p : environment.distribution) {
    if (p < 0.0 || !std::isfinite(p)) {
      throw std::invalid_argument("environment probabilities must be finite and non-negative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw std::invalid_argument("environment distribution must sum to one");
  }
  if (!environment.labels.empty() &&
      environment.labels.size() != environment.distribution.size()) {
    throw std::invalid_argument("environment label count does not match state count");
  }
}

void validate(const SensorSpec& sensor) {
  if (sensor.env_states < 1 || sensor.sensor_states < 1) {
    throw std::invalid_argument("sensor dimensions must be positive");
  }
  check_row_stochastic(sensor.table, sensor.env_states, sensor.sensor_states, "sensor");
}

SensorSpec paired_binary_sensor(int bits, double epsilon) {
  if (bits < 1 || bits > 16) {
    throw std::invalid_argument("paired binary sensor needs between 1 and 16 bits");
  }
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw std::invalid_argument("flip probability must lie in [0, 1]");
  }
  const int states = 1 << bits;
  SensorSpec s{states, states, {}};
  s.table.resize(static_cast<std::size_t>(states) * states);
  for (int mu = 0; mu < states; ++mu) {
    for (int y = 0; y < states; ++y) {
      double p = 1.0;
      for (int b = 0; b < bits; ++b) {
        const bool same = ((mu >> b) & 1) == ((y >> b) & 1);
        p *= same ? 1.0 - epsilon : epsilon;
      }
      s.table[static_cast<std::size_t>(mu) * states + y] = p;
    }
  }
  return s;
}

SensorSpec symmetric_noise_sensor(int states, double epsilon) {
  if (states < 2) {
    throw std::invalid_argument("symmetric noise sensor needs at least two states");
  }
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw std::invalid_argument("noise level must lie in [0, 1]");
  }
  SensorSpec s{states, states, {}};
  s.table.assign(static_cast<std::size_t>(states) * states, epsilon / (states - 1));
  for (int i = 0; i < states; ++i) {
    s.table[static_cast<std::size_t>(i) * states + i] = 1.0 - epsilon;
  }
  return s;
}

SensorSpec region_sensor(const AgentType& type, int env_states) {
  if (env_states < 1) {
    throw std::invalid_argument("environment must have at least one state");
  }
  std::set<int> region(type.region.begin(), type.region.end());
  if (region.size() != type.region.size()) {
    throw std::invalid_argument("type " + type.id + " repeats a region state");
  }
  for (int state : region) {
    if (state < 0 || state >= env_states) {
      throw std::invalid_argument("type " + type.id + " has a region state out of range");
    }
  }
  if (static_cast<int>(region.size()) == env_states) {
    throw std::invalid_argument("type " + type.id + " covers every environment state");
  }
  SensorSpec s{env_states, 2, {}};
  s.table.resize(static_cast<std::size_t>(env_states) * 2);
  for (int mu = 0; mu < env_states; ++mu) {
    if (region.empty()) {
      s.table[static_cast<std::size_t>(mu) * 2 + 0] = 0.5;
      s.table[static_cast<std::size_t>(mu) * 2 + 1] = 0.5;
    } else {
      const bool inside = region.count(mu) > 0;
      s.table[static_cast<std::size_t>(mu) * 2 + 0] = inside ? 1.0 : 0.0;
      s.table[static_cast<std::size_t>(mu) * 2 + 1] = inside ? 0.0 : 1.0;
    }
  }
  return s;
}

void validate(const Code& code) {
  if (code.sensor_states < 1 || code.output_states < 1) {
    throw std::invalid_argument("code dimensions must be positive");
  }
  check_row_stochastic(code.table, code.sensor_states, code.output_states, "code");
}

Code uniform_code(int sensor_states, int output_states) {
  if (sensor_states < 1 || output_states < 1) {
    throw std::invalid_argument("code dimensions must be positive");
  }
  Code c{sensor_states, output_states, {}};
  c.table.assign(static_cast<std::size_t>(sensor_states) * output_states,
                 1.0 / output_states);
  return c;
}

Code identity_code(int states) {
  if (states < 1) {
    throw std::invalid_argument("code dimensions must be positive");
  }
  Code c{states, states, {}};
  c.table.assign(static_cast<std::size_t>(states) * states, 0.0);
  for (int i = 0; i < states; ++i) {
    c.table[static_cast<std::size_t>(i) * states + i] = 1.0;
  }
  return c;
}

void validate(const PopulationStructure& structure) {
  if (structure.agent_count < 1) {
    throw std::invalid_argument("structure needs at least one agent");
  }
  const std::size_t n = static_cast<std::size_t>(structure.agent_count);
  if (structure.pair_probabilities.size() != n * n) {
    throw std::invalid_argument("structure matrix size does not match agent count");
  }
  double total = 0.0;
  for (double p : structure.pair_probabilities) {
    if (p < 0.0 || !std::isfinite(p)) {
      throw std::invalid_argument("pair probabilities must be finite and non-negative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw std::invalid_argument("pair probabilities must sum to one");
  }
}

PopulationStructure well_mixed_structure(int agent_count) {
  if (agent_count < 1) {
    throw std::invalid_argument("structure needs at least one agent");
  }
  PopulationStructure s{agent_count, {}};
  const std::size_t n = static_cast<std::size_t>(agent_count);
  s.pair_probabilities.assign(n * n, 1.0 / static_cast<double>(n * n));
  return s;
}

PopulationStructure grid_structure(int width, int height) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  const int n = width * height;
  PopulationStructure s{n, {}};
  s.pair_probabilities.assign(static_cast<std::size_t>(n) * n, 0.0);
  auto at = [&](int i, int j) -> double& {
    return s.pair_probabilities[static_cast<std::size_t>(i) * n + j];
  };
  int support = 0;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const int i = r * width + c;
      at(i, i) = 1.0;
      ++support;
      const int dr[] = {-1, 1, 0, 0};
      const int dc[] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        const int rr = r + dr[k];
        const int cc = c + dc[k];
        if (rr < 0 || rr >= height || cc < 0 || cc >= width) continue;
        at(i, rr * width + cc) = 1.0;
        ++support;
      }
    }
  }
  for (double& p : s.pair_probabilities) p /= support;
  return s;
}

void validate(const PopulationModel& model) {
  validate(model.environment);
  if (model.agents.empty()) {
    throw std::invalid_argument("model needs at least one agent");
  }
  if (model.output_states < 1) {
    throw std::invalid_argument("model output alphabet must be non-empty");
  }
  for (std::size_t i = 0; i < model.agents.size(); ++i) {
    const Agent& a = model.agents[i];
    const std::string who = "agent " + std::to_string(i);
    try {
      validate(a.sensor);
      validate(a.code);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(who + ": " + e.what());
    }
    if (a.sensor.env_states != model.environment.states()) {
      throw std::invalid_argument(who + ": sensor does not match the environment");
    }
    if (a.code.sensor_states != a.sensor.sensor_states) {
      throw std::invalid_argument(who + ": code does not match its sensor");
    }
    if (a.code.output_states != model.output_states) {
      throw std::invalid_argument(who + ": code does not match the output alphabet");
    }
  }
  validate(model.structure);
  if (model.structure.agent_count != static_cast<int>(model.agents.size())) {
    throw std::invalid_argument("structure agent count does not match the agent list");
  }
}

JointTable build_joint(const PopulationModel& model) {
  validate(model);
  const int n = model.structure.agent_count;
  const int env_states = model.environment.states();
  const int sensor_states = model.agents.front().sensor.sensor_states;
  const int output_states = model.output_states;
  for (const Agent& a : model.agents) {
    if (a.sensor.sensor_states != sensor_states) {
      throw std::invalid_argument(
          "exact joint requires all agents to share one sensor alphabet");
    }
  }

  const Variable theta = make_variable("theta", n);
  const Variable theta_p = make_variable("theta_p", n);
  const Variable mu = make_variable("mu", env_states, model.environment.labels);
  const Variable y = make_variable("y", sensor_states);
  const Variable y_p = make_variable("y_p", sensor_states);
  const Variable x = make_variable("x", output_states);
  const Variable x_p = make_variable("x_p", output_states);

  ConditionalTable pair_prior{{theta, theta_p}, {}, model.structure.pair_probabilities};
  ConditionalTable env_prior{{mu}, {}, model.environment.distribution};

  // p(y | mu, theta): rows laid out with theta fastest.
  auto sensor_factor = [&](const Variable& target, const Variable& agent_var) {
    ConditionalTable t{{target}, {mu, agent_var}, {}};
    t.rows.resize(static_cast<std::size_t>(env_states) * n * sensor_states);
    for (int m = 0; m < env_states; ++m) {
      for (int a = 0; a < n; ++a) {
        for (int s = 0; s < sensor_states; ++s) {
          t.rows[(static_cast<std::size_t>(m) * n + a) * sensor_states + s] =
              model.agents[a].sensor(m, s);
        }
      }
    }
    return t;
  };

  // p(x | y, theta): rows laid out with theta fastest.
  auto code_factor = [&](const Variable& target, const Variable& percept_var,
                         const Variable& agent_var) {
    ConditionalTable t{{target}, {percept_var, agent_var}, {}};
    t.rows.resize(static_cast<std::size_t>(sensor_states) * n * output_states);
    for (int s = 0; s < sensor_states; ++s) {
      for (int a = 0; a < n; ++a) {
        for (int o = 0; o < output_states; ++o) {
          t.rows[(static_cast<std::size_t>(s) * n + a) * output_states + o] =
              model.agents[a].code(s, o);
        }
      }
    }
    return t;
  };

  return product_and_normalize({pair_prior, env_prior,
                                sensor_factor(y, theta),
                                sensor_factor(y_p, theta_p),
                                code_factor(x, y, theta),
                                code_factor(x_p, y_p, theta_p)});
}

JointTable output_pair_joint(const PopulationModel& model) {
  const auto mixing = all_mixing_tables(model);
  return pair_channel_joint(model, mixing, model.output_states, "x",
                            mixing, model.output_states, "x_p");
}

JointTable sensor_pair_joint(const PopulationModel& model) {
  const int sensor_states = model.agents.front().sensor.sensor_states;
  for (const Agent& a : model.agents) {
    if (a.sensor.sensor_states != sensor_states) {
      throw std::invalid_argument(
          "sensor pair joint requires all agents to share one sensor alphabet");
    }
  }
  const auto sensors = all_sensor_tables(model);
  return pair_channel_joint(model, sensors, sensor_states, "y",
                            sensors, sensor_states, "y_p");
}

JointTable perception_pair_joint(const PopulationModel& model) {
  const int sensor_states = model.agents.front().sensor.sensor_states;
  for (const Agent& a : model.agents) {
    if (a.sensor.sensor_states != sensor_states) {
      throw std::invalid_argument(
          "perception pair joint requires all agents to share one sensor alphabet");
    }
  }
  const auto sensors = all_sensor_tables(model);
  const auto mixing = all_mixing_tables(model);
  return pair_channel_joint(model, sensors, sensor_states, "y",
                            mixing, model.output_states, "x_p");
}

double code_similarity(const PopulationModel& model) {
  return mutual_information(output_pair_joint(model), {"x"}, {"x_p"});
}

double similarity_bound(const PopulationModel& model) {
  return mutual_information(sensor_pair_joint(model), {"y"}, {"y_p"});
}

double env_info_pair(const PopulationModel& model) {
  return mutual_information(perception_pair_joint(model), {"mu"}, {"y", "x_p"});
}

double blind_info(const PopulationModel& model) {
  return mutual_information(output_pair_joint(model), {"mu"}, {"x", "x_p"});
}

double agent_env_info(const PopulationModel& model, int agent) {
  if (agent < 0 || agent >= static_cast<int>(model.agents.size())) {
    throw std::invalid_argument("agent index out of range");
  }
  const SensorSpec& s = model.agents[agent].sensor;
  const int env_states = model.environment.states();
  std::vector<double> joint(static_cast<std::size_t>(env_states) * s.sensor_states);
  for (int mu = 0; mu < env_states; ++mu) {
    for (int y = 0; y < s.sensor_states; ++y) {
      joint[static_cast<std::size_t>(mu) * s.sensor_states + y] =
          model.environment.distribution[mu] * s(mu, y);
    }
  }
  const JointTable t({make_variable("mu", env_states, model.environment.labels),
                      make_variable("y", s.sensor_states)},
                     std::move(joint));
  return mutual_information(t, {"mu"}, {"y"});
}

double agent_output_info(const PopulationModel& model, int agent) {
  if (agent < 0 || agent >= static_cast<int>(model.agents.size())) {
    throw std::invalid_argument("agent index out of range");
  }
  const std::vector<double> mix = mixing_table(model.agents[agent]);
  const int env_states = model.environment.states();
  const int output_states = model.output_states;
  std::vector<double> joint(static_cast<std::size_t>(env_states) * output_states);
  for (int mu = 0; mu < env_states; ++mu) {
    for (int x = 0; x < output_states; ++x) {
      joint[static_cast<std::size_t>(mu) * output_states + x] =
          model.environment.distribution[mu] *
          mix[static_cast<std::size_t>(mu) * output_states + x];
    }
  }
  const JointTable t({make_variable("mu", env_states, model.environment.labels),
                      make_variable("x", output_states)},
                     std::move(joint));
  return mutual_information(t, {"mu"}, {"x"});
}

}  // namespace codeevo
