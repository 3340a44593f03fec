#pragma once

#include <string>

#include <json.hpp>

#include "codeevo/runner.hpp"

namespace codeevo {

// Deterministic report of a finished run: same configuration and seed
// produce the same document byte for byte, so it carries no wall time
// and refers to sibling artifacts by file name only.
nlohmann::json results_document(const RunResult& run);

// Writes results.json, trace.csv, distances.csv, mds.csv, mds.svg,
// codes.json, codes_heatmap.svg, structure.dot and timing.txt into the
// directory, plus concepts.csv and concepts_heatmap.svg for the
// heterogeneous scenario.  Creates the directory if needed.
void write_run_artifacts(const RunResult& run, const std::string& out_dir);

// Writes sweep.csv and sweep.json plus one subdirectory of run
// artifacts per output alphabet size.
void write_sweep_artifacts(const SweepResult& sweep, const std::string& out_dir);

// Standalone analysis of a saved model: analysis.json, distances.csv,
// mds.csv, mds.svg, codes_heatmap.svg, structure.dot, concepts.csv and
// concepts_heatmap.svg.
void write_model_artifacts(const PopulationModel& model,
                           const AnalysisSettings& analysis,
                           const std::string& out_dir);

}  // namespace codeevo
