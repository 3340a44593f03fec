#include "codeevo/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace codeevo {

namespace {

// - p * log2(p) with the 0 log 0 = 0 convention.
double neg_p_log2_p(double p) {
  if (p <= kProbabilityFloor) return 0.0;
  return -p * std::log2(p);
}

std::vector<std::size_t> strides_for(const std::vector<Variable>& variables) {
  std::vector<std::size_t> strides(variables.size(), 1);
  for (int i = static_cast<int>(variables.size()) - 2; i >= 0; --i) {
    strides[i] = strides[i + 1] * static_cast<std::size_t>(variables[i + 1].cardinality);
  }
  return strides;
}

std::size_t joint_size(const std::vector<Variable>& variables) {
  std::size_t total = 1;
  for (const auto& v : variables) total *= static_cast<std::size_t>(v.cardinality);
  return total;
}

void check_unique_names(const std::vector<Variable>& variables) {
  std::unordered_set<std::string> seen;
  for (const auto& v : variables) {
    if (!seen.insert(v.name).second) {
      throw std::invalid_argument("duplicate variable name: " + v.name);
    }
  }
}

}  // namespace

Variable make_variable(std::string name, int cardinality,
                       std::vector<std::string> labels) {
  Variable v{std::move(name), cardinality, std::move(labels)};
  validate(v);
  return v;
}

void validate(const Variable& variable) {
  if (variable.name.empty()) {
    throw std::invalid_argument("variable name must not be empty");
  }
  if (variable.cardinality < 1) {
    throw std::invalid_argument("variable " + variable.name +
                                " must have at least one outcome");
  }
  if (!variable.labels.empty() &&
      variable.labels.size() != static_cast<std::size_t>(variable.cardinality)) {
    throw std::invalid_argument("variable " + variable.name +
                                " has a label count that does not match its cardinality");
  }
}

JointTable::JointTable(std::vector<Variable> variables,
                       std::vector<double> probabilities)
    : variables_(std::move(variables)), probabilities_(std::move(probabilities)) {
  for (const auto& v : variables_) validate(v);
  check_unique_names(variables_);
  if (probabilities_.size() != joint_size(variables_)) {
    throw std::invalid_argument("joint table size does not match variable cardinalities");
  }
  double total = 0.0;
  for (double p : probabilities_) {
    if (p < 0.0 || !std::isfinite(p)) {
      throw std::invalid_argument("joint table entries must be finite and non-negative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw std::invalid_argument("joint table probabilities must sum to one");
  }
}

int JointTable::variable_index(const std::string& name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

bool JointTable::has_variable(const std::string& name) const {
  return variable_index(name) >= 0;
}

std::size_t JointTable::flat_index(std::span<const int> outcome) const {
  if (outcome.size() != variables_.size()) {
    throw std::invalid_argument("outcome tuple length does not match variable count");
  }
  std::size_t index = 0;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (outcome[i] < 0 || outcome[i] >= variables_[i].cardinality) {
      throw std::invalid_argument("outcome out of range for variable " +
                                  variables_[i].name);
    }
    index = index * static_cast<std::size_t>(variables_[i].cardinality) +
            static_cast<std::size_t>(outcome[i]);
  }
  return index;
}

double JointTable::probability(std::span<const int> outcome) const {
  return probabilities_[flat_index(outcome)];
}

std::size_t ConditionalTable::target_size() const {
  return joint_size(targets);
}

std::size_t ConditionalTable::condition_size() const {
  return joint_size(conditions);
}

void validate(const ConditionalTable& table) {
  if (table.targets.empty()) {
    throw std::invalid_argument("conditional table must have at least one target");
  }
  for (const auto& v : table.targets) validate(v);
  for (const auto& v : table.conditions) validate(v);
  std::vector<Variable> all = table.conditions;
  all.insert(all.end(), table.targets.begin(), table.targets.end());
  check_unique_names(all);
  const std::size_t row_width = table.target_size();
  const std::size_t row_count = table.condition_size();
  if (table.rows.size() != row_width * row_count) {
    throw std::invalid_argument("conditional table size does not match its variables");
  }
  for (std::size_t r = 0; r < row_count; ++r) {
    double total = 0.0;
    for (std::size_t t = 0; t < row_width; ++t) {
      const double p = table.rows[r * row_width + t];
      if (p < 0.0 || !std::isfinite(p)) {
        throw std::invalid_argument("conditional table entries must be finite and non-negative");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
      throw std::invalid_argument("conditional table rows must each sum to one");
    }
  }
}

ConditionalTable to_factor(const JointTable& joint) {
  return ConditionalTable{joint.variables(), {}, joint.probabilities()};
}

JointTable marginalize(const JointTable& joint, const std::vector<std::string>& keep) {
  if (keep.empty()) {
    throw std::invalid_argument("marginalize requires at least one variable to keep");
  }
  std::unordered_set<std::string> keep_set;
  for (const auto& name : keep) {
    if (!joint.has_variable(name)) {
      throw std::invalid_argument("marginalize: unknown variable " + name);
    }
    keep_set.insert(name);
  }

  const auto& variables = joint.variables();
  std::vector<Variable> kept;
  for (const auto& v : variables) {
    if (keep_set.count(v.name)) kept.push_back(v);
  }

  const auto kept_strides = strides_for(kept);
  // For each source variable: its stride in the destination, or zero when
  // the variable is summed out.
  std::vector<std::size_t> dest_stride(variables.size(), 0);
  {
    std::size_t k = 0;
    for (std::size_t i = 0; i < variables.size(); ++i) {
      if (keep_set.count(variables[i].name)) {
        dest_stride[i] = kept_strides[k];
        ++k;
      }
    }
  }

  std::vector<double> result(joint_size(kept), 0.0);
  const auto& probs = joint.probabilities();
  std::vector<int> digits(variables.size(), 0);
  std::size_t dest = 0;
  for (std::size_t flat = 0; flat < probs.size(); ++flat) {
    result[dest] += probs[flat];
    // Advance the mixed-radix odometer and the destination index with it.
    for (int i = static_cast<int>(variables.size()) - 1; i >= 0; --i) {
      dest += dest_stride[i];
      if (++digits[i] < variables[i].cardinality) break;
      digits[i] = 0;
      dest -= dest_stride[i] * static_cast<std::size_t>(variables[i].cardinality);
    }
  }
  return JointTable(std::move(kept), std::move(result));
}

JointTable product_and_normalize(const std::vector<ConditionalTable>& factors) {
  if (factors.empty()) {
    throw std::invalid_argument("product requires at least one factor");
  }
  for (const auto& f : factors) validate(f);

  // Collect variables in order of first appearance (conditions before
  // targets within each factor) and check cardinality agreement.
  std::vector<Variable> variables;
  std::unordered_map<std::string, std::size_t> position;
  auto note_variable = [&](const Variable& v) {
    auto it = position.find(v.name);
    if (it == position.end()) {
      position.emplace(v.name, variables.size());
      variables.push_back(v);
      return;
    }
    if (variables[it->second].cardinality != v.cardinality) {
      throw std::invalid_argument("variable " + v.name +
                                  " has inconsistent cardinality across factors");
    }
    if (variables[it->second].labels.empty() && !v.labels.empty()) {
      variables[it->second].labels = v.labels;
    }
  };
  for (const auto& f : factors) {
    for (const auto& v : f.conditions) note_variable(v);
    for (const auto& v : f.targets) note_variable(v);
  }

  // Every variable must be the target of exactly one factor.
  std::unordered_map<std::string, int> target_count;
  for (const auto& f : factors) {
    for (const auto& v : f.targets) target_count[v.name] += 1;
  }
  for (const auto& v : variables) {
    auto it = target_count.find(v.name);
    if (it == target_count.end()) {
      throw std::invalid_argument("variable " + v.name + " is never a factor target");
    }
    if (it->second > 1) {
      throw std::invalid_argument("variable " + v.name +
                                  " is the target of more than one factor");
    }
  }

  // Reject cyclic dependencies among factors (condition -> target edges).
  {
    std::unordered_map<std::string, std::vector<std::string>> dependents;
    std::unordered_map<std::string, int> pending;
    for (const auto& v : variables) pending[v.name] = 0;
    for (const auto& f : factors) {
      for (const auto& t : f.targets) {
        pending[t.name] += static_cast<int>(f.conditions.size());
        for (const auto& c : f.conditions) dependents[c.name].push_back(t.name);
      }
    }
    std::vector<std::string> ready;
    for (const auto& [name, count] : pending) {
      if (count == 0) ready.push_back(name);
    }
    std::size_t resolved = 0;
    while (!ready.empty()) {
      const std::string name = ready.back();
      ready.pop_back();
      ++resolved;
      for (const auto& dep : dependents[name]) {
        if (--pending[dep] == 0) ready.push_back(dep);
      }
    }
    if (resolved != variables.size()) {
      throw std::invalid_argument("factorization contains a dependency cycle");
    }
  }

  const auto strides = strides_for(variables);

  // Precompute, per factor, the pairs (global variable position, stride of
  // that variable inside the factor's flattened row storage).
  struct FactorAccess {
    const ConditionalTable* table;
    std::vector<std::pair<std::size_t, std::size_t>> terms;
  };
  std::vector<FactorAccess> access;
  access.reserve(factors.size());
  for (const auto& f : factors) {
    FactorAccess fa{&f, {}};
    std::vector<const Variable*> order;
    for (const auto& v : f.conditions) order.push_back(&v);
    for (const auto& v : f.targets) order.push_back(&v);
    std::size_t stride = 1;
    std::vector<std::size_t> local(order.size());
    for (int i = static_cast<int>(order.size()) - 1; i >= 0; --i) {
      local[i] = stride;
      stride *= static_cast<std::size_t>(order[i]->cardinality);
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
      fa.terms.emplace_back(position.at(order[i]->name), local[i]);
    }
    access.push_back(std::move(fa));
  }

  std::vector<double> result(joint_size(variables));
  std::vector<int> digits(variables.size(), 0);
  double total = 0.0;
  for (std::size_t flat = 0; flat < result.size(); ++flat) {
    double p = 1.0;
    for (const auto& fa : access) {
      std::size_t idx = 0;
      for (const auto& [var, stride_in_factor] : fa.terms) {
        idx += static_cast<std::size_t>(digits[var]) * stride_in_factor;
      }
      p *= fa.table->rows[idx];
      if (p == 0.0) break;
    }
    result[flat] = p;
    total += p;
    for (int i = static_cast<int>(variables.size()) - 1; i >= 0; --i) {
      if (++digits[i] < variables[i].cardinality) break;
      digits[i] = 0;
    }
  }
  if (total <= 0.0) {
    throw std::invalid_argument("factor product has zero total mass");
  }
  for (double& p : result) p /= total;
  return JointTable(std::move(variables), std::move(result));
}

double entropy(const JointTable& joint, const std::vector<std::string>& over) {
  const JointTable marginal = marginalize(joint, over);
  double h = 0.0;
  for (double p : marginal.probabilities()) h += neg_p_log2_p(p);
  return h;
}

double mutual_information(const JointTable& joint,
                          const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
  std::vector<std::string> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const double value = entropy(joint, a) + entropy(joint, b) - entropy(joint, ab);
  return std::max(value, 0.0);
}

double conditional_mutual_information(const JointTable& joint,
                                      const std::vector<std::string>& a,
                                      const std::vector<std::string>& b,
                                      const std::vector<std::string>& given) {
  std::vector<std::string> ac = a;
  ac.insert(ac.end(), given.begin(), given.end());
  std::vector<std::string> bc = b;
  bc.insert(bc.end(), given.begin(), given.end());
  std::vector<std::string> abc = a;
  abc.insert(abc.end(), b.begin(), b.end());
  abc.insert(abc.end(), given.begin(), given.end());
  const double value = entropy(joint, ac) + entropy(joint, bc) -
                       entropy(joint, given) - entropy(joint, abc);
  return std::max(value, 0.0);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("KL divergence requires equal support sizes");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= kProbabilityFloor) continue;
    if (q[i] <= kProbabilityFloor) {
      throw std::invalid_argument(
          "KL divergence undefined: second distribution lacks mass where the first has some");
    }
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return d;
}

double jensen_shannon_divergence(std::span<const double> p,
                                 std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("JSD requires equal support sizes");
  }
  // The mixture dominates both inputs, so the divergence is always
  // defined; summing directly avoids the absolute-continuity check,
  // which a point just above the mass floor would trip spuriously.
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) d += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) d += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return std::clamp(d, 0.0, 1.0);
}

}  // namespace codeevo
