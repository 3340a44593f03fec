#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "codeevo/analysis.hpp"
#include "codeevo/model.hpp"
#include "test_util.hpp"

using namespace codeevo;

namespace {

Code row_code(std::vector<double> single_row) {
  Code c{1, static_cast<int>(single_row.size()), std::move(single_row)};
  return c;
}

Code random_code(std::mt19937_64& rng, int sensor_states, int output_states) {
  Code c{sensor_states, output_states, {}};
  for (int y = 0; y < sensor_states; ++y) {
    const auto row = codeevo::testing::random_distribution(rng, output_states);
    c.table.insert(c.table.end(), row.begin(), row.end());
  }
  return c;
}

}  // namespace

TEST_CASE("code distance basics") {
  const Code a = row_code({0.5, 0.5});
  const Code b = row_code({1.0, 0.0});
  const Code c = row_code({0.0, 1.0});

  CHECK(code_distance(a, a) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(code_distance(b, c) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(code_distance(a, b) ==
        doctest::Approx(std::sqrt(0.3112781244591328)).epsilon(1e-12));
  CHECK(code_distance(a, b) == doctest::Approx(code_distance(b, a)).epsilon(1e-14));

  const Code wide = row_code({0.25, 0.25, 0.5});
  CHECK_THROWS_AS(code_distance(a, wide), std::invalid_argument);
}

TEST_CASE("code distance satisfies the metric axioms") {
  std::mt19937_64 rng(424242);
  for (int trial = 0; trial < 200; ++trial) {
    const Code a = random_code(rng, 2, 3);
    const Code b = random_code(rng, 2, 3);
    const Code c = random_code(rng, 2, 3);
    const double ab = code_distance(a, b);
    const double bc = code_distance(b, c);
    const double ac = code_distance(a, c);
    CHECK(ab >= 0.0);
    CHECK(ab == doctest::Approx(code_distance(b, a)).epsilon(1e-14));
    CHECK(ac <= ab + bc + 1e-9);
    CHECK(code_distance(a, a) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("distance matrix is symmetric with zero diagonal") {
  std::mt19937_64 rng(11);
  std::vector<Code> codes;
  for (int i = 0; i < 5; ++i) codes.push_back(random_code(rng, 2, 2));
  const DistanceMatrix d = distance_matrix(codes);
  REQUIRE(d.count == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(d(i, i) == 0.0);
    for (int j = 0; j < 5; ++j) {
      CHECK(d(i, j) == doctest::Approx(d(j, i)).epsilon(1e-14));
    }
  }
}

TEST_CASE("classical scaling recovers planar configurations") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6;
    std::vector<std::array<double, 2>> points(n);
    for (auto& p : points) {
      p[0] = 2.0 * codeevo::testing::uniform01(rng) - 1.0;
      p[1] = 2.0 * codeevo::testing::uniform01(rng) - 1.0;
    }
    DistanceMatrix d;
    d.count = n;
    d.values.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        d.values[static_cast<std::size_t>(i) * n + j] =
            std::hypot(points[i][0] - points[j][0], points[i][1] - points[j][1]);
      }
    }
    const auto coords = classical_mds(d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double recovered =
            std::hypot(coords[i][0] - coords[j][0], coords[i][1] - coords[j][1]);
        CHECK(recovered == doctest::Approx(d(i, j)).epsilon(1e-9));
      }
    }
    // Deterministic orientation: the extreme coordinate of each used
    // axis is positive.
    for (int axis = 0; axis < 2; ++axis) {
      double extreme = 0.0;
      for (int i = 0; i < n; ++i) {
        if (std::abs(coords[i][axis]) > std::abs(extreme)) extreme = coords[i][axis];
      }
      CHECK(extreme >= 0.0);
    }
  }
}

TEST_CASE("classical scaling handles degenerate inputs") {
  DistanceMatrix pair;
  pair.count = 2;
  pair.values = {0.0, 3.0, 3.0, 0.0};
  const auto coords = classical_mds(pair);
  CHECK(std::abs(coords[0][0] - coords[1][0]) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(coords[0][1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(coords[1][1] == doctest::Approx(0.0).epsilon(1e-9));

  DistanceMatrix single;
  single.count = 1;
  single.values = {0.0};
  const auto one = classical_mds(single);
  CHECK(one[0][0] == 0.0);
  CHECK(one[0][1] == 0.0);

  // Collinear points need only one axis.
  DistanceMatrix line;
  line.count = 3;
  line.values = {0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0};
  const auto flat = classical_mds(line);
  for (int i = 0; i < 3; ++i) {
    CHECK(flat[static_cast<std::size_t>(i)][1] == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("grouping merges codes within tolerance") {
  const Code a = row_code({1.0, 0.0});
  const Code near_a = row_code({0.999, 0.001});
  const Code far = row_code({0.0, 1.0});
  const auto clusters = group_codes({a, near_a, far}, 0.1);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].members == std::vector<int>{0, 1});
  CHECK(clusters[1].members == std::vector<int>{2});
  CHECK(clusters[0].representative(0, 0) == doctest::Approx(0.9995).epsilon(1e-12));
  double total = 0.0;
  for (int x = 0; x < 2; ++x) total += clusters[0].representative(0, x);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  const auto singletons = group_codes({a, near_a, far}, 0.0);
  CHECK(singletons.size() == 3);

  // Single linkage: a chain of close codes forms one cluster even when
  // its endpoints are far apart.
  const Code mid = row_code({0.5, 0.5});
  const Code low = row_code({0.25, 0.75});
  const Code high = row_code({0.75, 0.25});
  const double link = std::max(code_distance(mid, low), code_distance(mid, high));
  const auto chained = group_codes({low, mid, high}, link + 1e-9);
  REQUIRE(chained.size() == 1);
  CHECK(chained[0].members == std::vector<int>{0, 1, 2});
  CHECK(code_distance(low, high) > link);
}

TEST_CASE("concept table lists occurring output pairs with posteriors") {
  PopulationModel m;
  m.environment = uniform_environment(2);
  m.output_states = 2;
  Agent a;
  a.sensor = symmetric_noise_sensor(2, 0.0);
  a.code = identity_code(2);
  m.agents = {a, a};
  m.structure = well_mixed_structure(2);

  const ConceptTable table = concept_table(m);
  REQUIRE(table.entries.size() == 2);
  CHECK(table.entries[0].speaker_output == 0);
  CHECK(table.entries[0].listener_output == 0);
  CHECK(table.entries[0].pair_probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(table.entries[0].posterior[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(table.entries[1].speaker_output == 1);
  CHECK(table.entries[1].posterior[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("structure graph symmetrizes and thresholds") {
  const PopulationStructure grid = grid_structure(3, 3);
  const StructureGraph g = structure_graph(grid, 0.0);
  CHECK(g.agent_count == 9);
  // Twelve undirected neighbour links plus nine self loops.
  CHECK(g.edges.size() == 21);
  CHECK(g.isolated.empty());
  for (const WeightedEdge& e : g.edges) {
    if (e.a != e.b) {
      CHECK(e.weight == doctest::Approx(2.0 / 33.0).epsilon(1e-12));
    } else {
      CHECK(e.weight == doctest::Approx(1.0 / 33.0).epsilon(1e-12));
    }
  }

  // An agent that never interacts is isolated.
  PopulationStructure lonely{3, {0.5, 0.0, 0.0,
                                 0.0, 0.5, 0.0,
                                 0.0, 0.0, 0.0}};
  const StructureGraph lg = structure_graph(lonely, 1e-9);
  CHECK(lg.isolated == std::vector<int>{2});
  REQUIRE(lg.edges.size() == 2);
  CHECK(lg.edges[0].a == 0);
  CHECK(lg.edges[0].b == 0);

  // Thresholding removes weak edges.
  const StructureGraph strict = structure_graph(grid, 1.5 / 33.0);
  for (const WeightedEdge& e : strict.edges) CHECK(e.a != e.b);
}

TEST_CASE("connected components ignore self loops") {
  const std::vector<WeightedEdge> edges{{0, 1, 1.0}, {1, 2, 1.0}, {4, 4, 1.0}};
  const auto components = connected_components(5, edges);
  REQUIRE(components.size() == 3);
  CHECK(components[0] == std::vector<int>{0, 1, 2});
  CHECK(components[1] == std::vector<int>{3});
  CHECK(components[2] == std::vector<int>{4});

  const auto none = connected_components(3, {});
  CHECK(none.size() == 3);

  CHECK_THROWS_AS(connected_components(2, {{0, 5, 1.0}}), std::invalid_argument);
}

TEST_CASE("grid structure graph is one component") {
  const StructureGraph g = structure_graph(grid_structure(5, 5), 0.0);
  const auto components = connected_components(g.agent_count, g.edges);
  CHECK(components.size() == 1);
  CHECK(components[0].size() == 25);
}
