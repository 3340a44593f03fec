#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "codeevo/infotheory.hpp"

namespace codeevo::testing {

inline double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Random strictly positive distribution over k outcomes.
inline std::vector<double> random_distribution(std::mt19937_64& rng, int k) {
  std::vector<double> p(k);
  double total = 0.0;
  for (double& v : p) {
    v = -std::log(uniform01(rng));
    total += v;
  }
  for (double& v : p) v /= total;
  return p;
}

inline JointTable random_joint(std::mt19937_64& rng,
                               const std::vector<int>& cardinalities) {
  std::vector<Variable> vars;
  std::size_t total = 1;
  for (std::size_t i = 0; i < cardinalities.size(); ++i) {
    vars.push_back(make_variable("v" + std::to_string(i), cardinalities[i]));
    total *= static_cast<std::size_t>(cardinalities[i]);
  }
  return JointTable(std::move(vars),
                    random_distribution(rng, static_cast<int>(total)));
}

}  // namespace codeevo::testing
