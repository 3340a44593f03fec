#include "codeevo/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "codeevo/analysis.hpp"
#include "codeevo/serialization.hpp"

namespace codeevo {

namespace {

using nlohmann::json;

std::string fixed6(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

std::string fixed3(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.3f", value);
  return buffer;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

std::string escape_xml(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<Code> model_codes(const PopulationModel& model) {
  std::vector<Code> codes;
  codes.reserve(model.agents.size());
  for (const Agent& agent : model.agents) codes.push_back(agent.code);
  return codes;
}

// Grey level for a probability: one maps to black.
std::string grey_fill(double p) {
  const int level = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(p, 0.0, 1.0))));
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "rgb(%d,%d,%d)", level, level, level);
  return buffer;
}

void write_distance_csv(const DistanceMatrix& distances,
                        const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "label";
  for (const std::string& label : distances.labels) out << "," << label;
  out << "\n";
  for (int i = 0; i < distances.count; ++i) {
    out << distances.labels[static_cast<std::size_t>(i)];
    for (int j = 0; j < distances.count; ++j) out << "," << fixed6(distances(i, j));
    out << "\n";
  }
}

struct MdsPoint {
  std::string label;
  std::string set;  // "initial" or "final"
  double x = 0.0;
  double y = 0.0;
};

void write_mds_csv(const std::vector<MdsPoint>& points,
                   const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "label,set,x,y\n";
  for (const MdsPoint& p : points) {
    out << p.label << "," << p.set << "," << fixed6(p.x) << "," << fixed6(p.y) << "\n";
  }
}

void write_mds_svg(const std::vector<MdsPoint>& points,
                   const std::filesystem::path& path) {
  const double size = 640.0;
  const double margin = 70.0;

  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  for (const MdsPoint& p : points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double span =
      std::max({max_x - min_x, max_y - min_y, 1e-9});
  const double scale = (size - 2.0 * margin) / span;
  const double mid_x = 0.5 * (min_x + max_x);
  const double mid_y = 0.5 * (min_y + max_y);
  const auto to_px = [&](double x) { return size / 2.0 + (x - mid_x) * scale; };
  const auto to_py = [&](double y) { return size / 2.0 - (y - mid_y) * scale; };

  std::ofstream out = open_output(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << " " << size
      << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size
      << "\" fill=\"white\"/>\n";
  out << "<rect x=\"" << margin / 2.0 << "\" y=\"" << margin / 2.0 << "\" width=\""
      << size - margin << "\" height=\"" << size - margin
      << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << size / 2.0 << "\" y=\"" << size - 10.0
      << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">axis 1"
         "</text>\n";
  out << "<text x=\"14\" y=\"" << size / 2.0
      << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 14 "
      << size / 2.0 << ")\">axis 2</text>\n";

  for (const MdsPoint& p : points) {
    const double px = to_px(p.x);
    const double py = to_py(p.y);
    if (p.set == "initial") {
      out << "<path d=\"M " << fixed3(px) << " " << fixed3(py - 6.0) << " L "
          << fixed3(px + 6.0) << " " << fixed3(py) << " L " << fixed3(px) << " "
          << fixed3(py + 6.0) << " L " << fixed3(px - 6.0) << " " << fixed3(py)
          << " Z\" fill=\"#d62728\" fill-opacity=\"0.8\">";
    } else {
      out << "<circle cx=\"" << fixed3(px) << "\" cy=\"" << fixed3(py)
          << "\" r=\"5\" fill=\"#1f77b4\" fill-opacity=\"0.8\">";
    }
    out << "<title>" << escape_xml(p.label) << "</title>";
    out << (p.set == "initial" ? "</path>\n" : "</circle>\n");
  }

  // Legend.
  out << "<path d=\"M 500 34 L 506 40 L 500 46 L 494 40 Z\" fill=\"#d62728\"/>\n";
  out << "<text x=\"514\" y=\"45\" font-family=\"sans-serif\" font-size=\"13\">initial"
         "</text>\n";
  out << "<circle cx=\"500\" cy=\"62\" r=\"5\" fill=\"#1f77b4\"/>\n";
  out << "<text x=\"514\" y=\"67\" font-family=\"sans-serif\" font-size=\"13\">final"
         "</text>\n";
  out << "</svg>\n";
}

void write_codes_heatmap(const PopulationModel& model,
                         const std::vector<CodeCluster>& clusters,
                         const std::filesystem::path& path) {
  const int cell = 26;
  const int label_w = 40;
  const int header_h = 30;
  const int block_gap = 24;
  const int outputs = model.output_states;

  int height = 10;
  int width = 0;
  for (const CodeCluster& cluster : clusters) {
    height += header_h + cell + cluster.representative.sensor_states * cell + block_gap;
    width = std::max(width, label_w + outputs * cell + 20);
  }
  width = std::max(width, 320);

  std::ofstream out = open_output(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";

  int y0 = 10;
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    const CodeCluster& cluster = clusters[k];
    const Code& rep = cluster.representative;
    std::string title = "cluster " + std::to_string(k + 1) + ": " +
                        std::to_string(cluster.members.size()) + " agent" +
                        (cluster.members.size() == 1 ? "" : "s");
    out << "<text x=\"10\" y=\"" << y0 + 16
        << "\" font-family=\"sans-serif\" font-size=\"14\" font-weight=\"bold\">"
        << escape_xml(title) << "</text>\n";
    y0 += header_h;

    for (int x = 0; x < outputs; ++x) {
      out << "<text x=\"" << label_w + x * cell + cell / 2 << "\" y=\"" << y0 + 14
          << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">x"
          << x + 1 << "</text>\n";
    }
    y0 += cell - 6;

    for (int y = 0; y < rep.sensor_states; ++y) {
      out << "<text x=\"" << label_w - 8 << "\" y=\"" << y0 + y * cell + 17
          << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">y"
          << y + 1 << "</text>\n";
      for (int x = 0; x < outputs; ++x) {
        const double p = rep(y, x);
        out << "<rect x=\"" << label_w + x * cell << "\" y=\"" << y0 + y * cell
            << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
            << grey_fill(p) << "\" stroke=\"#999999\" stroke-width=\"0.5\">"
            << "<title>p(x" << x + 1 << "|y" << y + 1 << ") = " << fixed6(p)
            << "</title></rect>\n";
      }
    }
    y0 += rep.sensor_states * cell + block_gap - (cell - 6);
  }
  out << "</svg>\n";
}

void write_structure_dot(const PopulationModel& model, double threshold,
                         const std::filesystem::path& path) {
  const StructureGraph graph = structure_graph(model.structure, threshold);
  double max_weight = 0.0;
  for (const WeightedEdge& e : graph.edges) max_weight = std::max(max_weight, e.weight);
  if (max_weight <= 0.0) max_weight = 1.0;

  std::ofstream out = open_output(path);
  out << "graph population {\n";
  out << "  layout=neato;\n";
  out << "  node [shape=circle, fontsize=10, width=0.35, fixedsize=true];\n";
  for (int i = 0; i < graph.agent_count; ++i) {
    out << "  n" << i << " [label=\"" << i;
    if (model.agents[static_cast<std::size_t>(i)].type_id) {
      out << "\\n" << *model.agents[static_cast<std::size_t>(i)].type_id;
    }
    out << "\"];\n";
  }
  for (const WeightedEdge& e : graph.edges) {
    out << "  n" << e.a << " -- n" << e.b << " [penwidth="
        << fixed3(0.3 + 3.7 * e.weight / max_weight) << ", tooltip=\""
        << fixed6(e.weight) << "\"];\n";
  }
  out << "}\n";
}

void write_concepts_csv(const ConceptTable& table,
                        const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "speaker_output,listener_output,pair_probability";
  for (int mu = 0; mu < table.env_states; ++mu) {
    const std::string label = table.env_labels.empty()
                                  ? std::to_string(mu + 1)
                                  : table.env_labels[static_cast<std::size_t>(mu)];
    out << ",p(mu=" << label << ")";
  }
  out << "\n";
  for (const ConceptEntry& entry : table.entries) {
    out << entry.speaker_output + 1 << "," << entry.listener_output + 1 << ","
        << fixed6(entry.pair_probability);
    for (double p : entry.posterior) out << "," << fixed6(p);
    out << "\n";
  }
}

void write_concepts_heatmap(const ConceptTable& table,
                            const std::filesystem::path& path) {
  const int cell = 22;
  const int label_w = 80;
  const int prob_w = 90;
  const int header_h = 40;
  const int width = label_w + table.env_states * cell + prob_w + 20;
  const int height = header_h + static_cast<int>(table.entries.size()) * cell + 20;

  std::ofstream out = open_output(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  for (int mu = 0; mu < table.env_states; ++mu) {
    const std::string label = table.env_labels.empty()
                                  ? std::to_string(mu + 1)
                                  : table.env_labels[static_cast<std::size_t>(mu)];
    out << "<text x=\"" << label_w + mu * cell + cell / 2 << "\" y=\"" << header_h - 8
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
        << escape_xml(label) << "</text>\n";
  }
  out << "<text x=\"" << label_w + table.env_states * cell + 12 << "\" y=\""
      << header_h - 8 << "\" font-family=\"sans-serif\" font-size=\"11\">pair prob."
      << "</text>\n";

  int row = 0;
  for (const ConceptEntry& entry : table.entries) {
    const int y = header_h + row * cell;
    out << "<text x=\"" << label_w - 8 << "\" y=\"" << y + 15
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">x"
        << entry.speaker_output + 1 << ",x'" << entry.listener_output + 1
        << "</text>\n";
    for (int mu = 0; mu < table.env_states; ++mu) {
      out << "<rect x=\"" << label_w + mu * cell << "\" y=\"" << y << "\" width=\""
          << cell << "\" height=\"" << cell << "\" fill=\""
          << grey_fill(entry.posterior[static_cast<std::size_t>(mu)])
          << "\" stroke=\"#999999\" stroke-width=\"0.5\">"
          << "<title>" << fixed6(entry.posterior[static_cast<std::size_t>(mu)])
          << "</title></rect>\n";
    }
    out << "<text x=\"" << label_w + table.env_states * cell + 12 << "\" y=\""
        << y + 15 << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << fixed6(entry.pair_probability) << "</text>\n";
    ++row;
  }
  out << "</svg>\n";
}

void write_trace_csv(const OptimizationTrace& trace,
                     const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "generation,best,mean,sigma\n";
  for (const GenerationRecord& g : trace.generations) {
    out << g.generation << "," << fixed6(g.best_so_far) << ","
        << fixed6(g.mean_fitness) << "," << fixed6(g.step_size) << "\n";
  }
}

json cluster_json(const PopulationModel& model,
                  const std::vector<CodeCluster>& clusters) {
  json out = json::array();
  for (const CodeCluster& cluster : clusters) {
    json entry;
    entry["members"] = cluster.members;
    entry["size"] = cluster.members.size();
    json types = json::array();
    bool any_type = false;
    for (int member : cluster.members) {
      const auto& type_id = model.agents[static_cast<std::size_t>(member)].type_id;
      if (type_id) {
        types.push_back(*type_id);
        any_type = true;
      }
    }
    if (any_type) entry["member_types"] = std::move(types);
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<MdsPoint> mds_points_for_run(const RunResult& run,
                                         DistanceMatrix* matrix_out) {
  const std::vector<Code> initial = model_codes(run.best.initial_model);
  const std::vector<Code> final_codes = model_codes(run.best.final_model);
  std::vector<Code> all = initial;
  all.insert(all.end(), final_codes.begin(), final_codes.end());
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < initial.size(); ++i) {
    labels.push_back("initial_" + std::to_string(i));
  }
  for (std::size_t i = 0; i < final_codes.size(); ++i) {
    labels.push_back("final_" + std::to_string(i));
  }
  const DistanceMatrix distances = distance_matrix(all, labels);
  const auto coords = classical_mds(distances);
  std::vector<MdsPoint> points;
  for (std::size_t i = 0; i < all.size(); ++i) {
    MdsPoint p;
    p.label = labels[i];
    p.set = i < initial.size() ? "initial" : "final";
    p.x = coords[i][0];
    p.y = coords[i][1];
    points.push_back(std::move(p));
  }
  if (matrix_out) *matrix_out = distances;
  return points;
}

}  // namespace

json results_document(const RunResult& run) {
  const PopulationModel& final_model = run.best.final_model;
  const std::vector<CodeCluster> clusters =
      group_codes(model_codes(final_model), run.config.analysis.cluster_tolerance);

  json document;
  document["scenario"] = to_string(run.config.scenario);
  document["agents"] = run.config.agent_count();
  document["outputs"] = run.config.outputs;
  document["environment_states"] = run.config.env_states;
  document["sensor_template"] = to_string(run.config.sensor_template);
  document["seed"] = run.config.seed;

  document["metrics"] = {
      {"initial_code_similarity", run.initial_code_similarity},
      {"code_similarity", run.final_code_similarity},
      {"similarity_bound", run.final_similarity_bound},
      {"blind_info", run.final_blind_info},
      {"env_info_pair", run.final_env_info_pair},
  };

  json agents_detail = json::array();
  for (std::size_t a = 0; a < final_model.agents.size(); ++a) {
    json entry;
    entry["index"] = a;
    if (final_model.agents[a].type_id) entry["type"] = *final_model.agents[a].type_id;
    entry["env_info"] = agent_env_info(final_model, static_cast<int>(a));
    entry["output_info"] = agent_output_info(final_model, static_cast<int>(a));
    agents_detail.push_back(std::move(entry));
  }
  document["agents_detail"] = std::move(agents_detail);

  document["clusters"] = cluster_json(final_model, clusters);

  json restarts = json::array();
  long evaluations_total = 0;
  for (const RestartRecord& record : run.restarts) {
    restarts.push_back({{"index", record.index},
                        {"seed", record.seed},
                        {"code_similarity", record.code_similarity},
                        {"blind_info", record.blind_info},
                        {"evaluations", record.evaluations},
                        {"stop_reason", record.stop_reason}});
    evaluations_total += record.evaluations;
  }
  document["optimizer"] = {
      {"restarts", std::move(restarts)},
      {"restarts_run", run.restarts.size()},
      {"selected_restart", run.selected_restart},
      {"evaluations_total", evaluations_total},
      {"generations", run.best.trace.generations.size()},
      {"stop_reason", run.best.trace.stop_reason},
  };

  json artifacts = {
      {"trace", "trace.csv"},       {"distances", "distances.csv"},
      {"mds", "mds.csv"},           {"mds_plot", "mds.svg"},
      {"codes", "codes.json"},      {"codes_heatmap", "codes_heatmap.svg"},
      {"structure", "structure.dot"},
  };
  if (run.config.scenario == ScenarioKind::heterogeneous) {
    artifacts["concepts"] = "concepts.csv";
    artifacts["concepts_heatmap"] = "concepts_heatmap.svg";
  }
  document["artifacts"] = std::move(artifacts);
  return document;
}

void write_run_artifacts(const RunResult& run, const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  {
    std::ofstream out = open_output(dir / "results.json");
    out << results_document(run).dump(1) << "\n";
  }

  write_trace_csv(run.best.trace, dir / "trace.csv");

  DistanceMatrix distances;
  const std::vector<MdsPoint> points = mds_points_for_run(run, &distances);
  write_distance_csv(distances, dir / "distances.csv");
  write_mds_csv(points, dir / "mds.csv");
  write_mds_svg(points, dir / "mds.svg");

  save_model(run.best.final_model, (dir / "codes.json").string());

  const std::vector<CodeCluster> clusters =
      group_codes(model_codes(run.best.final_model),
                  run.config.analysis.cluster_tolerance);
  write_codes_heatmap(run.best.final_model, clusters, dir / "codes_heatmap.svg");
  write_structure_dot(run.best.final_model, run.config.analysis.structure_threshold,
                      dir / "structure.dot");

  if (run.config.scenario == ScenarioKind::heterogeneous) {
    const ConceptTable concepts = concept_table(run.best.final_model);
    write_concepts_csv(concepts, dir / "concepts.csv");
    write_concepts_heatmap(concepts, dir / "concepts_heatmap.svg");
  }

  {
    std::ofstream out = open_output(dir / "timing.txt");
    out << "wall_seconds " << fixed3(run.wall_seconds) << "\n";
  }
}

void write_sweep_artifacts(const SweepResult& sweep, const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  {
    std::ofstream out = open_output(dir / "sweep.csv");
    out << "outputs,code_similarity,blind_info,similarity_bound,selected_restart,"
           "evaluations_total\n";
    for (const RunResult& run : sweep.entries) {
      long evaluations_total = 0;
      for (const RestartRecord& r : run.restarts) evaluations_total += r.evaluations;
      out << run.config.outputs << "," << fixed6(run.final_code_similarity) << ","
          << fixed6(run.final_blind_info) << "," << fixed6(run.final_similarity_bound)
          << "," << run.selected_restart << "," << evaluations_total << "\n";
    }
  }

  json summary;
  summary["scenario"] = to_string(sweep.base_config.scenario);
  summary["seed"] = sweep.base_config.seed;
  summary["min_outputs"] = sweep.min_outputs;
  summary["max_outputs"] = sweep.max_outputs;
  json entries = json::array();
  for (const RunResult& run : sweep.entries) {
    json blind_infos = json::array();
    for (const RestartRecord& r : run.restarts) blind_infos.push_back(r.blind_info);
    entries.push_back({
        {"outputs", run.config.outputs},
        {"directory", "x" + std::to_string(run.config.outputs)},
        {"code_similarity", run.final_code_similarity},
        {"blind_info", run.final_blind_info},
        {"similarity_bound", run.final_similarity_bound},
        {"selected_restart", run.selected_restart},
        {"restart_blind_infos", std::move(blind_infos)},
    });
  }
  summary["entries"] = std::move(entries);
  {
    std::ofstream out = open_output(dir / "sweep.json");
    out << summary.dump(1) << "\n";
  }

  for (const RunResult& run : sweep.entries) {
    write_run_artifacts(run,
                        (dir / ("x" + std::to_string(run.config.outputs))).string());
  }

  {
    std::ofstream out = open_output(dir / "timing.txt");
    out << "wall_seconds " << fixed3(sweep.wall_seconds) << "\n";
  }
}

void write_model_artifacts(const PopulationModel& model,
                           const AnalysisSettings& analysis,
                           const std::string& out_dir) {
  validate(model);
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  const std::vector<Code> codes = model_codes(model);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    labels.push_back("code_" + std::to_string(i));
  }
  const DistanceMatrix distances = distance_matrix(codes, labels);
  write_distance_csv(distances, dir / "distances.csv");

  const auto coords = classical_mds(distances);
  std::vector<MdsPoint> points;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    points.push_back(MdsPoint{labels[i], "final", coords[i][0], coords[i][1]});
  }
  write_mds_csv(points, dir / "mds.csv");
  write_mds_svg(points, dir / "mds.svg");

  const std::vector<CodeCluster> clusters =
      group_codes(codes, analysis.cluster_tolerance);
  write_codes_heatmap(model, clusters, dir / "codes_heatmap.svg");
  write_structure_dot(model, analysis.structure_threshold, dir / "structure.dot");

  const ConceptTable concepts = concept_table(model);
  write_concepts_csv(concepts, dir / "concepts.csv");
  write_concepts_heatmap(concepts, dir / "concepts_heatmap.svg");

  json document;
  document["agents"] = model.agents.size();
  document["outputs"] = model.output_states;
  document["environment_states"] = model.environment.states();
  document["metrics"] = {
      {"code_similarity", code_similarity(model)},
      {"similarity_bound", similarity_bound(model)},
      {"blind_info", blind_info(model)},
      {"env_info_pair", env_info_pair(model)},
  };
  json agents_detail = json::array();
  for (std::size_t a = 0; a < model.agents.size(); ++a) {
    json entry;
    entry["index"] = a;
    if (model.agents[a].type_id) entry["type"] = *model.agents[a].type_id;
    entry["env_info"] = agent_env_info(model, static_cast<int>(a));
    entry["output_info"] = agent_output_info(model, static_cast<int>(a));
    agents_detail.push_back(std::move(entry));
  }
  document["agents_detail"] = std::move(agents_detail);
  document["clusters"] = cluster_json(model, clusters);
  {
    std::ofstream out = open_output(dir / "analysis.json");
    out << document.dump(1) << "\n";
  }
}

}  // namespace codeevo
