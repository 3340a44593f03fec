#pragma once

#include <array>
#include <string>
#include <vector>

#include "codeevo/model.hpp"

namespace codeevo {

// Distance between two codes: the square root of the Jensen-Shannon
// divergence averaged uniformly over sensor states.  This is a metric
// on codes with a fixed shape, bounded by one.
double code_distance(const Code& a, const Code& b);

struct DistanceMatrix {
  int count = 0;
  std::vector<std::string> labels;
  std::vector<double> values;  // count x count, symmetric, zero diagonal

  double operator()(int i, int j) const {
    return values[static_cast<std::size_t>(i) * count + j];
  }
};

DistanceMatrix distance_matrix(const std::vector<Code>& codes,
                               const std::vector<std::string>& labels = {});

// Classical (Torgerson) multidimensional scaling onto the plane.  The
// embedding is mean-centered; each axis is oriented so its coordinate
// of largest magnitude is positive, making the output deterministic.
// Distance matrices of lower intrinsic dimension yield zero columns.
std::vector<std::array<double, 2>> classical_mds(const DistanceMatrix& distances);

struct CodeCluster {
  Code representative;       // entrywise mean of the members, rows renormalized
  std::vector<int> members;  // ascending code indices
};

// Single-linkage grouping: codes within the tolerance are linked and
// linked groups are merged transitively.  Clusters are ordered by
// descending size, breaking ties by smallest member index.
std::vector<CodeCluster> group_codes(const std::vector<Code>& codes,
                                     double tolerance);

struct ConceptEntry {
  int speaker_output = 0;
  int listener_output = 0;
  double pair_probability = 0.0;
  std::vector<double> posterior;  // p(mu | speaker_output, listener_output)
};

struct ConceptTable {
  int env_states = 0;
  std::vector<std::string> env_labels;
  std::vector<ConceptEntry> entries;  // ordered by (speaker, listener) output
};

// Environment posteriors for every output pair with non-vanishing
// probability under the model.
ConceptTable concept_table(const PopulationModel& model);

struct WeightedEdge {
  int a = 0;
  int b = 0;  // a == b encodes a self loop
  double weight = 0.0;
};

struct StructureGraph {
  int agent_count = 0;
  std::vector<WeightedEdge> edges;   // ordered by (a, b), a <= b
  std::vector<int> isolated;         // nodes with no incident edge at all
};

// Undirected view of a pair distribution: the weight between distinct
// agents i and j is p(i, j) + p(j, i); self loops keep p(i, i).  Edges
// at or below the threshold are dropped.
StructureGraph structure_graph(const PopulationStructure& structure,
                               double threshold);

// Connected components induced by the edges; self loops do not connect
// anything.  Components are ordered by their smallest node.
std::vector<std::vector<int>> connected_components(
    int node_count, const std::vector<WeightedEdge>& edges);

}  // namespace codeevo
