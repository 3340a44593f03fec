#include "codeevo/runner.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <optional>
#include <stdexcept>

namespace codeevo {

namespace {

double selection_value(ScenarioKind kind, double similarity, double blind) {
  return kind == ScenarioKind::heterogeneous ? blind : similarity;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RunResult run_scenario(const ScenarioConfig& config, int threads) {
  const auto start_time = std::chrono::steady_clock::now();

  RunResult run;
  run.config = config;
  run.reference = build_template(config);
  const ParamCodec codec = codec_for(config, run.reference);

  CmaEsConfig base;
  base.dimension = codec.dimension();
  base.population_size = config.optimizer.population_size;
  base.initial_step = config.optimizer.initial_step;
  base.max_evaluations = config.optimizer.max_evaluations;
  base.stagnation_generations = config.optimizer.stagnation_generations;
  base.stagnation_tolerance = config.optimizer.stagnation_tolerance;

  // With one shared sensor and a fixed pair distribution the percept
  // similarity is a hard ceiling for the objective, so restarts can
  // stop as soon as they reach it.  The flexible scenario moves the
  // ceiling by optimizing the pair distribution, and per-type sensors
  // make percept similarity no ceiling at all, so those scenarios run
  // every restart to completion.
  const bool skippable = config.scenario == ScenarioKind::well_mixed ||
                         config.scenario == ScenarioKind::grid;
  std::optional<double> target;
  if (skippable) {
    target = similarity_bound(run.reference);
  }

  const int total = config.effective_restarts();
  auto run_restart = [&](int index) {
    CmaEsConfig restart_config = base;
    restart_config.seed = derive_seed(config.seed, static_cast<std::uint64_t>(index));
    restart_config.target_value = target;
    restart_config.target_tolerance = config.optimizer.bound_tolerance;
    return optimize_scenario(codec, restart_config);
  };

  std::vector<std::optional<ScenarioResult>> outcomes(static_cast<std::size_t>(total));
  const auto reached_target = [&](const ScenarioResult& result) {
    return skippable && target &&
           result.trace.best_value >= *target - config.optimizer.bound_tolerance;
  };

  if (threads <= 1) {
    for (int r = 0; r < total; ++r) {
      outcomes[static_cast<std::size_t>(r)] = run_restart(r);
      if (reached_target(*outcomes[static_cast<std::size_t>(r)])) break;
    }
  } else {
    // Waves of parallel restarts.  Selection below only ever considers
    // the prefix up to the first restart that reached the target, so
    // the outcome matches a single-threaded run exactly.
    for (int wave = 0; wave < total; wave += threads) {
      const int end = std::min(total, wave + threads);
      std::vector<std::future<ScenarioResult>> futures;
      for (int r = wave; r < end; ++r) {
        futures.push_back(std::async(std::launch::async, run_restart, r));
      }
      for (int r = wave; r < end; ++r) {
        outcomes[static_cast<std::size_t>(r)] = futures[static_cast<std::size_t>(r - wave)].get();
      }
      bool done = false;
      for (int r = wave; r < end; ++r) {
        if (reached_target(*outcomes[static_cast<std::size_t>(r)])) {
          done = true;
          break;
        }
      }
      if (done) break;
    }
  }

  // The considered prefix ends at the first restart that reached the
  // target; anything computed past it is discarded.
  int considered = 0;
  for (int r = 0; r < total; ++r) {
    if (!outcomes[static_cast<std::size_t>(r)]) break;
    considered = r + 1;
    if (reached_target(*outcomes[static_cast<std::size_t>(r)])) break;
  }
  if (considered == 0) {
    throw std::logic_error("no restart produced a result");
  }

  int selected = 0;
  double selected_value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < considered; ++r) {
    const ScenarioResult& outcome = *outcomes[static_cast<std::size_t>(r)];
    RestartRecord record;
    record.index = r;
    record.seed = derive_seed(config.seed, static_cast<std::uint64_t>(r));
    record.code_similarity = outcome.trace.best_value;
    record.blind_info = blind_info(outcome.final_model);
    record.evaluations = outcome.trace.evaluations;
    record.stop_reason = outcome.trace.stop_reason;
    run.restarts.push_back(std::move(record));

    const double value = selection_value(config.scenario, outcome.trace.best_value,
                                         run.restarts.back().blind_info);
    if (value > selected_value) {
      selected_value = value;
      selected = r;
    }
  }

  run.selected_restart = selected;
  run.best = *outcomes[static_cast<std::size_t>(selected)];
  run.final_code_similarity = run.best.trace.best_value;
  run.final_similarity_bound = similarity_bound(run.best.final_model);
  run.final_blind_info = run.restarts[static_cast<std::size_t>(selected)].blind_info;
  run.final_env_info_pair = env_info_pair(run.best.final_model);
  run.initial_code_similarity = code_similarity(run.best.initial_model);

  run.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
          .count();
  return run;
}

SweepResult run_sweep(const ScenarioConfig& config, int min_outputs,
                      int max_outputs, int threads) {
  if (min_outputs < 2) {
    throw std::invalid_argument("sweep needs at least two output states");
  }
  if (max_outputs < min_outputs) {
    throw std::invalid_argument("sweep range is empty");
  }
  const auto start_time = std::chrono::steady_clock::now();

  SweepResult sweep;
  sweep.base_config = config;
  sweep.min_outputs = min_outputs;
  sweep.max_outputs = max_outputs;
  for (int outputs = min_outputs; outputs <= max_outputs; ++outputs) {
    ScenarioConfig entry_config = config;
    entry_config.outputs = outputs;
    entry_config.seed = derive_seed(config.seed, 1000000 + static_cast<std::uint64_t>(outputs));
    sweep.entries.push_back(run_scenario(entry_config, threads));
  }
  sweep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
          .count();
  return sweep;
}

}  // namespace codeevo
