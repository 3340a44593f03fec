#include "codeevo/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>

#include "codeevo/infotheory.hpp"

namespace codeevo {

namespace {

// Union-find over node indices.
class DisjointSets {
 public:
  explicit DisjointSets(int count) : parent_(count) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  void merge(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::vector<int> parent_;
};

}  // namespace

double code_distance(const Code& a, const Code& b) {
  if (a.sensor_states != b.sensor_states || a.output_states != b.output_states) {
    throw std::invalid_argument("code distance requires codes of the same shape");
  }
  double mean_divergence = 0.0;
  for (int y = 0; y < a.sensor_states; ++y) {
    const std::span<const double> row_a(
        a.table.data() + static_cast<std::size_t>(y) * a.output_states,
        static_cast<std::size_t>(a.output_states));
    const std::span<const double> row_b(
        b.table.data() + static_cast<std::size_t>(y) * b.output_states,
        static_cast<std::size_t>(b.output_states));
    mean_divergence += jensen_shannon_divergence(row_a, row_b);
  }
  mean_divergence /= a.sensor_states;
  return std::sqrt(mean_divergence);
}

DistanceMatrix distance_matrix(const std::vector<Code>& codes,
                               const std::vector<std::string>& labels) {
  if (codes.empty()) {
    throw std::invalid_argument("distance matrix requires at least one code");
  }
  if (!labels.empty() && labels.size() != codes.size()) {
    throw std::invalid_argument("label count does not match code count");
  }
  const int n = static_cast<int>(codes.size());
  DistanceMatrix d;
  d.count = n;
  d.labels = labels;
  d.values.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dist = code_distance(codes[i], codes[j]);
      d.values[static_cast<std::size_t>(i) * n + j] = dist;
      d.values[static_cast<std::size_t>(j) * n + i] = dist;
    }
  }
  return d;
}

std::vector<std::array<double, 2>> classical_mds(const DistanceMatrix& distances) {
  const int n = distances.count;
  if (n < 1 || distances.values.size() != static_cast<std::size_t>(n) * n) {
    throw std::invalid_argument("malformed distance matrix");
  }

  // Double-center the squared distances: B = -1/2 J D^2 J.
  Eigen::MatrixXd squared(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = distances(i, j);
      squared(i, j) = d * d;
    }
  }
  const Eigen::VectorXd row_mean = squared.rowwise().mean();
  const double total_mean = squared.mean();
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gram(i, j) = -0.5 * (squared(i, j) - row_mean(i) - row_mean(j) + total_mean);
    }
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("scaling eigendecomposition failed");
  }

  // Eigenvalues arrive in ascending order; use the two largest.  Values
  // within rounding error of zero indicate a rank-deficient input and
  // leave their column zero.
  const double negligible =
      std::max(0.0, solver.eigenvalues()(n - 1)) * 1e-12;
  std::vector<std::array<double, 2>> coords(static_cast<std::size_t>(n), {0.0, 0.0});
  for (int axis = 0; axis < 2; ++axis) {
    const int index = n - 1 - axis;
    if (index < 0) break;
    const double value = solver.eigenvalues()(index);
    if (value <= negligible) continue;
    const double scale = std::sqrt(value);
    Eigen::VectorXd column = solver.eigenvectors().col(index) * scale;
    // Orient the axis so its largest-magnitude coordinate is positive.
    int extreme = 0;
    for (int i = 1; i < n; ++i) {
      if (std::abs(column(i)) > std::abs(column(extreme))) extreme = i;
    }
    if (column(extreme) < 0.0) column = -column;
    for (int i = 0; i < n; ++i) coords[static_cast<std::size_t>(i)][axis] = column(i);
  }
  return coords;
}

std::vector<CodeCluster> group_codes(const std::vector<Code>& codes,
                                     double tolerance) {
  if (codes.empty()) {
    throw std::invalid_argument("grouping requires at least one code");
  }
  if (tolerance < 0.0) {
    throw std::invalid_argument("grouping tolerance must be non-negative");
  }
  const int n = static_cast<int>(codes.size());
  DisjointSets sets(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (code_distance(codes[i], codes[j]) <= tolerance) sets.merge(i, j);
    }
  }

  std::vector<std::vector<int>> members_by_root(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    members_by_root[static_cast<std::size_t>(sets.find(i))].push_back(i);
  }

  std::vector<CodeCluster> clusters;
  for (auto& members : members_by_root) {
    if (members.empty()) continue;
    CodeCluster cluster;
    cluster.members = members;
    Code mean = codes[static_cast<std::size_t>(members.front())];
    std::fill(mean.table.begin(), mean.table.end(), 0.0);
    for (int index : members) {
      const Code& c = codes[static_cast<std::size_t>(index)];
      for (std::size_t k = 0; k < mean.table.size(); ++k) mean.table[k] += c.table[k];
    }
    for (int y = 0; y < mean.sensor_states; ++y) {
      double total = 0.0;
      for (int x = 0; x < mean.output_states; ++x) total += mean(y, x);
      for (int x = 0; x < mean.output_states; ++x) {
        mean.table[static_cast<std::size_t>(y) * mean.output_states + x] /= total;
      }
    }
    cluster.representative = std::move(mean);
    clusters.push_back(std::move(cluster));
  }

  std::sort(clusters.begin(), clusters.end(),
            [](const CodeCluster& a, const CodeCluster& b) {
              if (a.members.size() != b.members.size()) {
                return a.members.size() > b.members.size();
              }
              return a.members.front() < b.members.front();
            });
  return clusters;
}

ConceptTable concept_table(const PopulationModel& model) {
  const JointTable joint = output_pair_joint(model);
  const int env_states = model.environment.states();
  const int outputs = model.output_states;

  ConceptTable table;
  table.env_states = env_states;
  table.env_labels = model.environment.labels;
  for (int x = 0; x < outputs; ++x) {
    for (int x_p = 0; x_p < outputs; ++x_p) {
      double mass = 0.0;
      std::vector<double> posterior(static_cast<std::size_t>(env_states), 0.0);
      for (int mu = 0; mu < env_states; ++mu) {
        const int outcome[] = {mu, x, x_p};
        const double p = joint.probability(outcome);
        posterior[static_cast<std::size_t>(mu)] = p;
        mass += p;
      }
      if (mass <= kProbabilityFloor) continue;  // output pair never occurs
      for (double& p : posterior) p /= mass;
      table.entries.push_back(ConceptEntry{x, x_p, mass, std::move(posterior)});
    }
  }
  return table;
}

StructureGraph structure_graph(const PopulationStructure& structure,
                               double threshold) {
  validate(structure);
  const int n = structure.agent_count;
  StructureGraph graph;
  graph.agent_count = n;
  std::vector<bool> incident(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double weight =
          i == j ? structure(i, i) : structure(i, j) + structure(j, i);
      if (weight <= threshold) continue;
      graph.edges.push_back(WeightedEdge{i, j, weight});
      incident[static_cast<std::size_t>(i)] = true;
      incident[static_cast<std::size_t>(j)] = true;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!incident[static_cast<std::size_t>(i)]) graph.isolated.push_back(i);
  }
  return graph;
}

std::vector<std::vector<int>> connected_components(
    int node_count, const std::vector<WeightedEdge>& edges) {
  if (node_count < 0) {
    throw std::invalid_argument("node count must be non-negative");
  }
  DisjointSets sets(node_count);
  for (const WeightedEdge& e : edges) {
    if (e.a < 0 || e.a >= node_count || e.b < 0 || e.b >= node_count) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.a != e.b) sets.merge(e.a, e.b);
  }
  std::vector<std::vector<int>> by_root(static_cast<std::size_t>(node_count));
  for (int i = 0; i < node_count; ++i) {
    by_root[static_cast<std::size_t>(sets.find(i))].push_back(i);
  }
  std::vector<std::vector<int>> components;
  for (auto& nodes : by_root) {
    if (!nodes.empty()) components.push_back(std::move(nodes));
  }
  std::sort(components.begin(), components.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              return a.front() < b.front();
            });
  return components;
}

}  // namespace codeevo
