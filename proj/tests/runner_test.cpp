#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "codeevo/artifacts.hpp"
#include "codeevo/config.hpp"
#include "codeevo/runner.hpp"
#include "codeevo/serialization.hpp"
#include "test_util.hpp"

using namespace codeevo;
using nlohmann::json;

namespace {

json base_config_document() {
  return json{
      {"scenario", "well_mixed"},
      {"agents", 3},
      {"environment", {{"states", 2}}},
      {"sensors", {{"template", "paired_binary"}, {"bits", 1}, {"epsilon", 0.01}}},
      {"outputs", 2},
      {"seed", 5},
  };
}

ScenarioConfig tiny_run_config() {
  ScenarioConfig config = parse_config(base_config_document());
  config.optimizer.max_evaluations = 4000;
  config.optimizer.population_size = 12;
  config.optimizer.restarts = 2;
  config.optimizer.bound_tolerance = 1e-3;
  return config;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "codeevo_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("config parsing applies defaults and validates") {
  const ScenarioConfig config = parse_config(base_config_document());
  CHECK(config.scenario == ScenarioKind::well_mixed);
  CHECK(config.agents == 3);
  CHECK(config.outputs == 2);
  CHECK(config.seed == 5);
  CHECK(config.effective_restarts() == 3);
  CHECK(config.optimizer.max_evaluations == 200000);
  CHECK(config.analysis.cluster_tolerance == 1e-3);
}

TEST_CASE("config parsing rejects malformed documents") {
  json doc = base_config_document();
  doc.erase("scenario");
  CHECK_THROWS_WITH_AS(parse_config(doc), "config: missing \"scenario\"",
                       std::invalid_argument);

  doc = base_config_document();
  doc["scenario"] = "ring";
  CHECK_THROWS_AS(parse_config(doc), std::invalid_argument);

  doc = base_config_document();
  doc["typo_key"] = 1;
  CHECK_THROWS_WITH_AS(parse_config(doc),
                       "config: unknown key \"typo_key\" in document",
                       std::invalid_argument);

  doc = base_config_document();
  doc["sensors"]["bits"] = 3;  // 2^3 != 2 states
  CHECK_THROWS_AS(parse_config(doc), std::invalid_argument);

  doc = base_config_document();
  doc["outputs"] = 1;
  CHECK_THROWS_AS(parse_config(doc), std::invalid_argument);

  doc = base_config_document();
  doc["agents"] = 1;
  CHECK_THROWS_AS(parse_config(doc), std::invalid_argument);
}

TEST_CASE("heterogeneous configs expand types in order") {
  const json doc{
      {"scenario", "heterogeneous"},
      {"environment", {{"states", 9}}},
      {"sensors",
       {{"template", "regions"},
        {"types",
         json::array({
             json{{"id", "t1"}, {"region", json::array()}, {"count", 2}},
             json{{"id", "t2"}, {"region", {1, 2, 4, 5}}, {"count", 3}},
         })}}},
      {"outputs", 4},
  };
  const ScenarioConfig config = parse_config(doc);
  CHECK(config.agent_count() == 5);
  CHECK(config.effective_restarts() == 10);

  const PopulationModel model = build_template(config);
  REQUIRE(model.agents.size() == 5);
  CHECK(*model.agents[0].type_id == "t1");
  CHECK(*model.agents[2].type_id == "t2");
  // Blind type: uniform sensor rows.
  CHECK(model.agents[0].sensor(0, 0) == 0.5);
  // Region states are one-based in the file: state 1 activates t2.
  CHECK(model.agents[2].sensor(0, 0) == 1.0);
  CHECK(model.agents[2].sensor(2, 0) == 0.0);
  // Environment labels default to one-based numbering.
  CHECK(model.environment.labels[0] == "1");
  CHECK(model.environment.labels[8] == "9");
}

TEST_CASE("region template and scenario must match") {
  json doc = base_config_document();
  doc["sensors"] = {{"template", "regions"},
                    {"types", json::array({json{{"id", "a"}, {"count", 3}}})}};
  CHECK_THROWS_AS(parse_config(doc), std::invalid_argument);
}

TEST_CASE("model serialization round trip is exact") {
  std::mt19937_64 rng(828282);
  PopulationModel model;
  model.environment.distribution = codeevo::testing::random_distribution(rng, 3);
  model.environment.labels = {"1", "2", "3"};
  model.output_states = 2;
  for (int a = 0; a < 3; ++a) {
    Agent agent;
    agent.sensor.env_states = 3;
    agent.sensor.sensor_states = 2;
    for (int mu = 0; mu < 3; ++mu) {
      const auto row = codeevo::testing::random_distribution(rng, 2);
      agent.sensor.table.insert(agent.sensor.table.end(), row.begin(), row.end());
    }
    agent.code.sensor_states = 2;
    agent.code.output_states = 2;
    for (int y = 0; y < 2; ++y) {
      const auto row = codeevo::testing::random_distribution(rng, 2);
      agent.code.table.insert(agent.code.table.end(), row.begin(), row.end());
    }
    if (a == 1) agent.type_id = "special";
    model.agents.push_back(std::move(agent));
  }
  model.structure =
      PopulationStructure{3, codeevo::testing::random_distribution(rng, 9)};

  const PopulationModel restored = deserialize_model(serialize_model(model));
  CHECK(restored.environment.distribution == model.environment.distribution);
  CHECK(restored.environment.labels == model.environment.labels);
  REQUIRE(restored.agents.size() == model.agents.size());
  for (std::size_t a = 0; a < model.agents.size(); ++a) {
    CHECK(restored.agents[a].sensor.table == model.agents[a].sensor.table);
    CHECK(restored.agents[a].code.table == model.agents[a].code.table);
    CHECK(restored.agents[a].type_id == model.agents[a].type_id);
  }
  CHECK(restored.structure.pair_probabilities == model.structure.pair_probabilities);

  CHECK_THROWS_AS(deserialize_model(json{{"agents", json::array()}}),
                  std::invalid_argument);
}

TEST_CASE("seed derivation separates streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("scenario runs are reproducible and audited") {
  const ScenarioConfig config = tiny_run_config();
  const RunResult first = run_scenario(config);
  const RunResult second = run_scenario(config);

  CHECK(results_document(first).dump() == results_document(second).dump());
  CHECK(first.final_code_similarity >= 0.0);
  CHECK(first.final_code_similarity <= first.final_similarity_bound + 1e-9);
  CHECK(first.restarts.size() >= 1);

  // A noiseless channel pair converges to the percept bound quickly.
  CHECK(first.final_code_similarity > 0.5);

  const auto dir = fresh_dir("run_artifacts");
  write_run_artifacts(first, dir.string());
  for (const char* name :
       {"results.json", "trace.csv", "distances.csv", "mds.csv", "mds.svg",
        "codes.json", "codes_heatmap.svg", "structure.dot", "timing.txt"}) {
    CHECK(std::filesystem::exists(dir / name));
  }

  // Closed loop: the saved model reproduces the reported metrics.
  const PopulationModel reloaded = load_model((dir / "codes.json").string());
  CHECK(code_similarity(reloaded) ==
        doctest::Approx(first.final_code_similarity).epsilon(1e-12));
  CHECK(blind_info(reloaded) ==
        doctest::Approx(first.final_blind_info).epsilon(1e-12));

  const json results = json::parse(slurp(dir / "results.json"));
  CHECK(results.at("metrics").at("code_similarity").get<double>() ==
        doctest::Approx(first.final_code_similarity).epsilon(1e-12));
  CHECK(results.at("optimizer").at("restarts").size() == first.restarts.size());
  // Artifact references stay relative so reports are location-independent.
  for (const auto& [key, value] : results.at("artifacts").items()) {
    (void)key;
    CHECK(value.get<std::string>().find('/') == std::string::npos);
  }
}

TEST_CASE("artifact bytes are identical across runs and directories") {
  const ScenarioConfig config = tiny_run_config();
  const auto dir_a = fresh_dir("bytes_a");
  const auto dir_b = fresh_dir("bytes_b");
  write_run_artifacts(run_scenario(config), dir_a.string());
  write_run_artifacts(run_scenario(config), dir_b.string());
  for (const char* name : {"results.json", "trace.csv", "distances.csv", "mds.csv",
                           "mds.svg", "codes.json", "codes_heatmap.svg",
                           "structure.dot"}) {
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
  }
}

TEST_CASE("thread count does not change the outcome") {
  const ScenarioConfig config = tiny_run_config();
  const RunResult sequential = run_scenario(config, 1);
  const RunResult parallel = run_scenario(config, 4);
  CHECK(results_document(sequential).dump() == results_document(parallel).dump());
}

TEST_CASE("restart skipping stops after the bound is reached") {
  ScenarioConfig config = tiny_run_config();
  config.optimizer.restarts = 5;
  config.optimizer.bound_tolerance = 0.5;  // generous: first restart qualifies
  const RunResult run = run_scenario(config);
  CHECK(run.restarts.size() == 1);
  CHECK(run.restarts[0].stop_reason == "target_reached");
}

TEST_CASE("sweeps cover the requested range") {
  ScenarioConfig config = tiny_run_config();
  config.optimizer.max_evaluations = 2000;
  config.optimizer.restarts = 1;
  const SweepResult sweep = run_sweep(config, 2, 3);
  REQUIRE(sweep.entries.size() == 2);
  CHECK(sweep.entries[0].config.outputs == 2);
  CHECK(sweep.entries[1].config.outputs == 3);
  // Distinct alphabets draw from distinct seed streams.
  CHECK(sweep.entries[0].config.seed != sweep.entries[1].config.seed);

  const auto dir = fresh_dir("sweep_artifacts");
  write_sweep_artifacts(sweep, dir.string());
  CHECK(std::filesystem::exists(dir / "sweep.csv"));
  CHECK(std::filesystem::exists(dir / "sweep.json"));
  CHECK(std::filesystem::exists(dir / "x2" / "results.json"));
  CHECK(std::filesystem::exists(dir / "x3" / "results.json"));

  CHECK_THROWS_AS(run_sweep(config, 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(run_sweep(config, 4, 3), std::invalid_argument);
}

TEST_CASE("standalone analysis artifacts") {
  const ScenarioConfig config = tiny_run_config();
  const RunResult run = run_scenario(config);
  const auto run_dir = fresh_dir("analyze_input");
  write_run_artifacts(run, run_dir.string());

  const PopulationModel model = load_model((run_dir / "codes.json").string());
  const auto out_dir = fresh_dir("analyze_output");
  AnalysisSettings settings;
  write_model_artifacts(model, settings, out_dir.string());
  for (const char* name :
       {"analysis.json", "distances.csv", "mds.csv", "mds.svg",
        "codes_heatmap.svg", "structure.dot", "concepts.csv",
        "concepts_heatmap.svg"}) {
    CHECK(std::filesystem::exists(out_dir / name));
  }
  const json analysis = json::parse(slurp(out_dir / "analysis.json"));
  CHECK(analysis.at("metrics").at("code_similarity").get<double>() ==
        doctest::Approx(run.final_code_similarity).epsilon(1e-12));
}
