#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace codeevo {

// Probabilities at or below this threshold are treated as exact zeros
// inside logarithms, with the convention 0 * log(0) = 0.
inline constexpr double kProbabilityFloor = 1e-15;

// Distributions must sum to one within this tolerance.
inline constexpr double kNormalizationTolerance = 1e-9;

// A named discrete random variable with finitely many outcomes.
// Labels are optional outcome names; when present there must be exactly
// one label per outcome.
struct Variable {
  std::string name;
  int cardinality = 0;
  std::vector<std::string> labels;
};

Variable make_variable(std::string name, int cardinality,
                       std::vector<std::string> labels = {});

void validate(const Variable& variable);

// Dense joint distribution over an ordered list of variables.
// Probabilities are stored row-major: the last variable's index varies
// fastest.  Entries are non-negative and sum to one.
class JointTable {
 public:
  JointTable() = default;
  JointTable(std::vector<Variable> variables, std::vector<double> probabilities);

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<double>& probabilities() const { return probabilities_; }
  std::size_t size() const { return probabilities_.size(); }

  // Index of the named variable, or -1 when absent.
  int variable_index(const std::string& name) const;
  bool has_variable(const std::string& name) const;

  std::size_t flat_index(std::span<const int> outcome) const;
  double probability(std::span<const int> outcome) const;

 private:
  std::vector<Variable> variables_;
  std::vector<double> probabilities_;
};

// Conditional distribution p(targets | conditions).  Rows are stored
// condition-major: one normalized distribution over target tuples per
// condition tuple, with the last condition's index varying fastest
// across rows and the last target's index varying fastest within a row.
// A table with no conditions is a prior over its targets.
struct ConditionalTable {
  std::vector<Variable> targets;
  std::vector<Variable> conditions;
  std::vector<double> rows;

  std::size_t target_size() const;
  std::size_t condition_size() const;
};

void validate(const ConditionalTable& table);

// Wraps a joint distribution as a factor with no conditions.
ConditionalTable to_factor(const JointTable& joint);

// Sums out every variable not listed in keep.  The kept variables retain
// their original relative order.  Unknown names are an error.
JointTable marginalize(const JointTable& joint, const std::vector<std::string>& keep);

// Multiplies a set of conditional tables forming a directed acyclic
// factorization (each variable is the target of exactly one factor) and
// normalizes the result.  The resulting variable order follows first
// appearance while scanning each factor's conditions, then its targets.
JointTable product_and_normalize(const std::vector<ConditionalTable>& factors);

// Shannon entropy in bits of the marginal over the given variables.
double entropy(const JointTable& joint, const std::vector<std::string>& over);

// Mutual information in bits between two disjoint groups of variables,
// computed as H(A) + H(B) - H(A,B) and clamped to be non-negative.
double mutual_information(const JointTable& joint,
                          const std::vector<std::string>& a,
                          const std::vector<std::string>& b);

// Conditional mutual information I(A;B | C) in bits, computed as
// H(A,C) + H(B,C) - H(C) - H(A,B,C) and clamped to be non-negative.
double conditional_mutual_information(const JointTable& joint,
                                      const std::vector<std::string>& a,
                                      const std::vector<std::string>& b,
                                      const std::vector<std::string>& given);

// Kullback-Leibler divergence D(p || q) in bits.  Throws when q lacks
// mass somewhere p has some.
double kl_divergence(std::span<const double> p, std::span<const double> q);

// Jensen-Shannon divergence in bits; symmetric, bounded to [0, 1].
double jensen_shannon_divergence(std::span<const double> p,
                                 std::span<const double> q);

}  // namespace codeevo
