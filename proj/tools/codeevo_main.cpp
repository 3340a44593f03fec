#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include "codeevo/artifacts.hpp"
#include "codeevo/config.hpp"
#include "codeevo/runner.hpp"
#include "codeevo/serialization.hpp"

namespace {

std::string pick_output_dir(const std::string& cli_dir, const std::string& config_dir,
                            const std::string& fallback) {
  if (!cli_dir.empty()) return cli_dir;
  if (!config_dir.empty()) return config_dir;
  return fallback;
}

void print_run_summary(const codeevo::RunResult& run, const std::string& out_dir) {
  std::printf("scenario: %s (%d agents, %d outputs)\n",
              codeevo::to_string(run.config.scenario).c_str(),
              run.config.agent_count(), run.config.outputs);
  std::printf("restarts run: %zu, selected: %d\n", run.restarts.size(),
              run.selected_restart);
  std::printf("code_similarity: %.6f (bound %.6f)\n", run.final_code_similarity,
              run.final_similarity_bound);
  std::printf("blind_info: %.6f, env_info_pair: %.6f\n", run.final_blind_info,
              run.final_env_info_pair);
  std::printf("artifacts: %s\n", out_dir.c_str());
  std::printf("wall time: %.1f s\n", run.wall_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation laboratory for the evolution of shared codes in "
               "structured populations of communicating agents"};
  app.require_subcommand(1);

  std::string config_path;
  std::string codes_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  int xmin = 2;
  int xmax = 9;
  double cluster_tolerance = 1e-3;
  double structure_threshold = 1e-4;

  CLI::App* run_cmd =
      app.add_subcommand("run", "Optimize one scenario and write its artifacts");
  run_cmd->add_option("--config", config_path, "Scenario configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "Override the configured seed")
      ->each([&seed_given](const std::string&) { seed_given = true; });
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--threads", threads, "Parallel restarts (1 = sequential)")
      ->check(CLI::PositiveNumber);

  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Repeat the scenario over a range of output alphabet sizes");
  sweep_cmd->add_option("--config", config_path, "Scenario configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--xmin", xmin, "Smallest output alphabet size")->required();
  sweep_cmd->add_option("--xmax", xmax, "Largest output alphabet size")->required();
  sweep_cmd->add_option("--seed", seed, "Override the configured seed")
      ->each([&seed_given](const std::string&) { seed_given = true; });
  sweep_cmd->add_option("--out", out_dir, "Output directory");
  sweep_cmd->add_option("--threads", threads, "Parallel restarts (1 = sequential)")
      ->check(CLI::PositiveNumber);

  CLI::App* analyze_cmd = app.add_subcommand(
      "analyze", "Recompute analysis artifacts from a saved model");
  analyze_cmd->add_option("--codes", codes_path, "Saved model (codes.json)")
      ->required()
      ->check(CLI::ExistingFile);
  analyze_cmd->add_option("--out", out_dir, "Output directory")->required();
  analyze_cmd->add_option("--cluster-tolerance", cluster_tolerance,
                          "Code distance below which codes share a cluster");
  analyze_cmd->add_option("--structure-threshold", structure_threshold,
                          "Pair probability below which edges are dropped");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      codeevo::ScenarioConfig config = codeevo::load_config(config_path);
      if (seed_given) config.seed = seed;
      const std::string dir = pick_output_dir(out_dir, config.output_dir, "out");
      const codeevo::RunResult result = codeevo::run_scenario(config, threads);
      codeevo::write_run_artifacts(result, dir);
      print_run_summary(result, dir);
    } else if (sweep_cmd->parsed()) {
      codeevo::ScenarioConfig config = codeevo::load_config(config_path);
      if (seed_given) config.seed = seed;
      const std::string dir = pick_output_dir(out_dir, config.output_dir, "out");
      const codeevo::SweepResult result =
          codeevo::run_sweep(config, xmin, xmax, threads);
      codeevo::write_sweep_artifacts(result, dir);
      std::printf("sweep over outputs %d..%d\n", xmin, xmax);
      for (const codeevo::RunResult& entry : result.entries) {
        std::printf("outputs %d: blind_info %.6f (code_similarity %.6f)\n",
                    entry.config.outputs, entry.final_blind_info,
                    entry.final_code_similarity);
      }
      std::printf("artifacts: %s\n", dir.c_str());
      std::printf("wall time: %.1f s\n", result.wall_seconds);
    } else if (analyze_cmd->parsed()) {
      const codeevo::PopulationModel model = codeevo::load_model(codes_path);
      codeevo::AnalysisSettings settings;
      settings.cluster_tolerance = cluster_tolerance;
      settings.structure_threshold = structure_threshold;
      codeevo::write_model_artifacts(model, settings, out_dir);
      std::printf("artifacts: %s\n", out_dir.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
