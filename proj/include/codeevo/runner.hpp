#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codeevo/config.hpp"
#include "codeevo/optim.hpp"

namespace codeevo {

// Stream-split seed derivation so restarts and sweep entries draw from
// unrelated random sequences.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct RestartRecord {
  int index = 0;
  std::uint64_t seed = 0;
  double code_similarity = 0.0;
  double blind_info = 0.0;
  long evaluations = 0;
  std::string stop_reason;
};

struct RunResult {
  ScenarioConfig config;
  PopulationModel reference;
  ScenarioResult best;
  int selected_restart = 0;
  std::vector<RestartRecord> restarts;

  // Metrics of the selected run.
  double final_code_similarity = 0.0;
  double final_similarity_bound = 0.0;
  double final_blind_info = 0.0;
  double final_env_info_pair = 0.0;
  double initial_code_similarity = 0.0;

  double wall_seconds = 0.0;  // reported separately, never persisted in results
};

// Optimizes the configured scenario with restarts.  Restarts run from
// derived seeds; once one reaches the percept-level bound (within the
// configured tolerance) the remaining ones are skipped.  The selected
// restart maximizes the code similarity, except in the heterogeneous
// scenario, which selects by environment information in the outputs and
// never skips restarts.  Results are independent of the thread count.
RunResult run_scenario(const ScenarioConfig& config, int threads = 1);

struct SweepResult {
  ScenarioConfig base_config;
  int min_outputs = 0;
  int max_outputs = 0;
  std::vector<RunResult> entries;  // one per output alphabet size
  double wall_seconds = 0.0;
};

// Repeats the scenario for every output alphabet size in the range.
SweepResult run_sweep(const ScenarioConfig& config, int min_outputs,
                      int max_outputs, int threads = 1);

}  // namespace codeevo
