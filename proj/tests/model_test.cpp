#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "codeevo/model.hpp"
#include "test_util.hpp"

using namespace codeevo;

namespace {

std::vector<double> random_stochastic_rows(std::mt19937_64& rng, int rows, int cols) {
  std::vector<double> table;
  table.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    const auto row = codeevo::testing::random_distribution(rng, cols);
    table.insert(table.end(), row.begin(), row.end());
  }
  return table;
}

PopulationModel random_model(std::mt19937_64& rng, int agents, int env_states,
                             int sensor_states, int output_states) {
  PopulationModel m;
  m.environment.distribution = codeevo::testing::random_distribution(rng, env_states);
  m.output_states = output_states;
  for (int a = 0; a < agents; ++a) {
    Agent agent;
    agent.sensor = SensorSpec{env_states, sensor_states,
                              random_stochastic_rows(rng, env_states, sensor_states)};
    agent.code = Code{sensor_states, output_states,
                      random_stochastic_rows(rng, sensor_states, output_states)};
    m.agents.push_back(std::move(agent));
  }
  m.structure = PopulationStructure{
      agents, codeevo::testing::random_distribution(rng, agents * agents)};
  return m;
}

// Observer plus two speakers, as in the two-code comparison: the pair
// distribution always picks agent 0 as one side and agent 1 or 2,
// equally likely, as the other.
PopulationModel observer_pair_model(bool opposite_codes) {
  PopulationModel m;
  m.environment = uniform_environment(2);
  m.output_states = 2;
  for (int a = 0; a < 3; ++a) {
    Agent agent;
    agent.sensor = paired_binary_sensor(1, 0.01);
    agent.code = identity_code(2);
    m.agents.push_back(std::move(agent));
  }
  if (opposite_codes) {
    m.agents[2].code.table = {0.0, 1.0, 1.0, 0.0};
  }
  m.structure = PopulationStructure{3, {0.0, 0.5, 0.5,
                                        0.0, 0.0, 0.0,
                                        0.0, 0.0, 0.0}};
  return m;
}

}  // namespace

TEST_CASE("well mixed structure is uniform over ordered pairs") {
  const PopulationStructure s = well_mixed_structure(5);
  REQUIRE(s.agent_count == 5);
  for (double p : s.pair_probabilities) {
    CHECK(p == doctest::Approx(1.0 / 25.0).epsilon(1e-12));
  }
  validate(s);
}

TEST_CASE("grid structure covers neighbours and self pairs") {
  const PopulationStructure g3 = grid_structure(3, 3);
  int support = 0;
  for (double p : g3.pair_probabilities) {
    if (p > 0.0) {
      CHECK(p == doctest::Approx(1.0 / 33.0).epsilon(1e-12));
      ++support;
    }
  }
  CHECK(support == 33);
  validate(g3);

  const PopulationStructure g5 = grid_structure(5, 5);
  int support5 = 0;
  for (double p : g5.pair_probabilities) {
    if (p > 0.0) ++support5;
  }
  CHECK(support5 == 105);

  // Corner agent 0 of the 3x3 grid interacts with itself, agent 1 and
  // agent 3 only.
  CHECK(g3(0, 0) > 0.0);
  CHECK(g3(0, 1) > 0.0);
  CHECK(g3(0, 3) > 0.0);
  CHECK(g3(0, 2) == 0.0);
  CHECK(g3(0, 4) == 0.0);
  // Pairs are symmetric by construction.
  CHECK(g3(1, 0) > 0.0);
}

TEST_CASE("paired binary sensor flips bits independently") {
  const SensorSpec s = paired_binary_sensor(2, 0.01);
  REQUIRE(s.env_states == 4);
  REQUIRE(s.sensor_states == 4);
  CHECK(s(0, 0) == doctest::Approx(0.99 * 0.99).epsilon(1e-12));
  CHECK(s(0, 3) == doctest::Approx(0.01 * 0.01).epsilon(1e-12));
  CHECK(s(1, 0) == doctest::Approx(0.99 * 0.01).epsilon(1e-12));
  validate(s);
  CHECK_THROWS_AS(paired_binary_sensor(0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(paired_binary_sensor(2, -0.1), std::invalid_argument);
}

TEST_CASE("symmetric noise sensor spreads error mass evenly") {
  const SensorSpec s = symmetric_noise_sensor(4, 0.01);
  CHECK(s(2, 2) == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(s(2, 0) == doctest::Approx(0.01 / 3.0).epsilon(1e-12));
  validate(s);
  CHECK_THROWS_AS(symmetric_noise_sensor(1, 0.01), std::invalid_argument);
}

TEST_CASE("region sensor detects membership") {
  const AgentType type{"t2", {0, 1, 3, 4}};
  const SensorSpec s = region_sensor(type, 9);
  CHECK(s(0, 0) == 1.0);
  CHECK(s(0, 1) == 0.0);
  CHECK(s(2, 1) == 1.0);
  validate(s);

  const AgentType blind{"t1", {}};
  const SensorSpec b = region_sensor(blind, 9);
  for (int mu = 0; mu < 9; ++mu) {
    CHECK(b(mu, 0) == 0.5);
    CHECK(b(mu, 1) == 0.5);
  }

  const AgentType full{"bad", {0, 1, 2}};
  CHECK_THROWS_AS(region_sensor(full, 3), std::invalid_argument);
  const AgentType out{"bad", {7}};
  CHECK_THROWS_AS(region_sensor(out, 3), std::invalid_argument);
  const AgentType dup{"bad", {1, 1}};
  CHECK_THROWS_AS(region_sensor(dup, 3), std::invalid_argument);
}

TEST_CASE("model validation names the offending agent") {
  PopulationModel m;
  m.environment = uniform_environment(2);
  m.output_states = 2;
  Agent a;
  a.sensor = paired_binary_sensor(1, 0.0);
  a.code = identity_code(2);
  m.agents = {a, a};
  m.structure = well_mixed_structure(2);
  CHECK_NOTHROW(validate(m));

  m.agents[1].code = identity_code(3);
  try {
    validate(m);
    FAIL("expected validation error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("agent 1") != std::string::npos);
  }
}

TEST_CASE("joint for aligned noiseless pair is fully correlated") {
  PopulationModel m;
  m.environment = uniform_environment(2);
  m.output_states = 2;
  Agent a;
  a.sensor = paired_binary_sensor(1, 0.0);
  a.code = identity_code(2);
  m.agents = {a, a};
  m.structure = well_mixed_structure(2);

  CHECK(code_similarity(m) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(similarity_bound(m) == doctest::Approx(1.0).epsilon(1e-12));

  // Flipping one agent's code makes the outputs independent: half the
  // pairings agree and half disagree.
  m.agents[1].code.table = {0.0, 1.0, 1.0, 0.0};
  CHECK(code_similarity(m) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(similarity_bound(m) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("observer with matching and opposite speaker codes") {
  const PopulationModel matching = observer_pair_model(false);
  const PopulationModel opposite = observer_pair_model(true);

  CHECK(env_info_pair(matching) == doctest::Approx(0.9787298518).epsilon(1e-9));
  CHECK(env_info_pair(opposite) == doctest::Approx(0.9192068641).epsilon(1e-9));
  CHECK(agent_env_info(matching, 0) == doctest::Approx(0.9192068641).epsilon(1e-9));

  const JointTable joint = build_joint(opposite);
  CHECK(conditional_mutual_information(joint, {"mu"}, {"x_p"}, {"y"}) ==
        doctest::Approx(0.0).epsilon(1e-9));
  const JointTable joint_matching = build_joint(matching);
  CHECK(conditional_mutual_information(joint_matching, {"mu"}, {"x_p"}, {"y"}) ==
        doctest::Approx(0.0595229877).epsilon(1e-9));
}

TEST_CASE("fast objectives agree with the exact joint") {
  std::mt19937_64 rng(7151);
  for (int trial = 0; trial < 20; ++trial) {
    const PopulationModel m = random_model(rng, 3, 3, 2, 2);
    const JointTable joint = build_joint(m);

    CHECK(code_similarity(m) ==
          doctest::Approx(mutual_information(joint, {"x"}, {"x_p"})).epsilon(1e-12));
    CHECK(similarity_bound(m) ==
          doctest::Approx(mutual_information(joint, {"y"}, {"y_p"})).epsilon(1e-12));
    CHECK(env_info_pair(m) ==
          doctest::Approx(mutual_information(joint, {"mu"}, {"y", "x_p"})).epsilon(1e-12));
    CHECK(blind_info(m) ==
          doctest::Approx(mutual_information(joint, {"mu"}, {"x", "x_p"})).epsilon(1e-12));
  }
}

TEST_CASE("exact joint marginals match the factors") {
  std::mt19937_64 rng(40919);
  const PopulationModel m = random_model(rng, 3, 2, 2, 3);
  const JointTable joint = build_joint(m);

  const JointTable pair = marginalize(joint, {"theta", "theta_p"});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int outcome[] = {i, j};
      CHECK(pair.probability(outcome) == doctest::Approx(m.structure(i, j)).epsilon(1e-12));
    }
  }

  const JointTable env = marginalize(joint, {"mu"});
  for (int mu = 0; mu < 2; ++mu) {
    const int outcome[] = {mu};
    CHECK(env.probability(outcome) ==
          doctest::Approx(m.environment.distribution[mu]).epsilon(1e-12));
  }

  // p(mu, theta, y) factorizes as p(mu) p(theta) p(y | mu, theta).
  const JointTable sensor_marginal = marginalize(joint, {"theta", "mu", "y"});
  const JointTable theta_marginal = marginalize(joint, {"theta"});
  for (int a = 0; a < 3; ++a) {
    for (int mu = 0; mu < 2; ++mu) {
      for (int y = 0; y < 2; ++y) {
        const int outcome[] = {a, mu, y};
        const int ao[] = {a};
        const double expected = theta_marginal.probability(ao) *
                                m.environment.distribution[mu] *
                                m.agents[a].sensor(mu, y);
        CHECK(sensor_marginal.probability(outcome) ==
              doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("relabeling outputs leaves the objectives unchanged") {
  std::mt19937_64 rng(333);
  const PopulationModel original = random_model(rng, 4, 3, 2, 3);
  PopulationModel relabeled = original;
  const int perm[] = {2, 0, 1};
  for (Agent& agent : relabeled.agents) {
    Code shuffled = agent.code;
    for (int y = 0; y < agent.code.sensor_states; ++y) {
      for (int x = 0; x < 3; ++x) {
        shuffled.table[static_cast<std::size_t>(y) * 3 + perm[x]] = agent.code(y, x);
      }
    }
    agent.code = shuffled;
  }
  CHECK(code_similarity(relabeled) ==
        doctest::Approx(code_similarity(original)).epsilon(1e-12));
  CHECK(blind_info(relabeled) == doctest::Approx(blind_info(original)).epsilon(1e-12));
  CHECK(env_info_pair(relabeled) ==
        doctest::Approx(env_info_pair(original)).epsilon(1e-12));
}

TEST_CASE("shared sensors bound code similarity") {
  std::mt19937_64 rng(515151);
  for (int trial = 0; trial < 30; ++trial) {
    PopulationModel m = random_model(rng, 3, 3, 2, 2);
    // One shared sensor and a factorized pair distribution make the
    // percepts a data-processing bottleneck for the outputs.
    for (Agent& agent : m.agents) agent.sensor = m.agents[0].sensor;
    m.structure = well_mixed_structure(3);
    CHECK(code_similarity(m) <= similarity_bound(m) + 1e-9);
  }
}

TEST_CASE("per-agent information measures") {
  PopulationModel m;
  m.environment = uniform_environment(9);
  m.output_states = 2;
  Agent sighted;
  sighted.sensor = region_sensor(AgentType{"t2", {0, 1, 3, 4}}, 9);
  sighted.code = identity_code(2);
  Agent blind;
  blind.sensor = region_sensor(AgentType{"t1", {}}, 9);
  blind.code = identity_code(2);
  m.agents = {sighted, blind};
  m.structure = well_mixed_structure(2);

  CHECK(agent_env_info(m, 0) == doctest::Approx(0.991076059838).epsilon(1e-9));
  CHECK(agent_env_info(m, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(agent_output_info(m, 0) == doctest::Approx(0.991076059838).epsilon(1e-9));
  CHECK(agent_output_info(m, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(agent_env_info(m, 5), std::invalid_argument);
}

TEST_CASE("well mixed pair of noisy sensors reaches the known bound") {
  // Identical sensors reading two independent bits through noise: the
  // percept-percept information has a closed form via the composed
  // binary channel with flip probability 2 eps (1 - eps).
  PopulationModel m;
  m.environment = uniform_environment(4);
  m.output_states = 4;
  Agent a;
  a.sensor = paired_binary_sensor(2, 0.01);
  a.code = identity_code(4);
  m.agents = {a, a};
  m.structure = well_mixed_structure(2);
  CHECK(similarity_bound(m) == doctest::Approx(1.719367752792).epsilon(1e-9));
  // Identity codes pass the full percept through.
  CHECK(code_similarity(m) == doctest::Approx(1.719367752792).epsilon(1e-9));
}
