#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fpomdp/belief.hpp"

namespace fpomdp {

/// Disjoint, nonempty variable classes covering every variable. Each class
/// is treated as one metavariable by the simplifier.
class ClassPartition {
 public:
  ClassPartition() = default;
  /// Throws std::invalid_argument on overlap, gaps, empty classes or bad indices.
  ClassPartition(std::vector<std::vector<std::size_t>> classes, std::size_t num_vars);

  /// One class holding every variable; the simplifier is then the identity.
  static ClassPartition single(std::size_t num_vars);
  /// One class per variable; the full product-of-marginals simplifier.
  static ClassPartition singletons(std::size_t num_vars);
  /// The model's `classes`, or a single class when the model declares none.
  static ClassPartition from_model(const FactoredPomdp& model);

  std::size_t num_vars() const noexcept { return num_vars_; }
  std::size_t num_classes() const noexcept { return classes_.size(); }
  const std::vector<std::size_t>& members(std::size_t c) const { return classes_[c]; }
  const std::vector<std::vector<std::size_t>>& classes() const noexcept { return classes_; }
  std::size_t class_size(std::size_t c) const { return std::size_t{1} << classes_[c].size(); }

  /// Assignment of class c's variables in joint state s, packed little-endian
  /// in the order the class lists them.
  std::size_t local_index(std::size_t c, StateIndex s) const;

  friend bool operator==(const ClassPartition&, const ClassPartition&) = default;

 private:
  std::vector<std::vector<std::size_t>> classes_;
  std::size_t num_vars_ = 0;
};

/// Product-of-class-marginals belief: a fixed point of the simplifier.
class SimplifiedBelief {
 public:
  SimplifiedBelief() = default;
  /// Each marginal must sum to 1 within 1e-9 and have 2^|class| entries.
  SimplifiedBelief(ClassPartition partition, std::vector<std::vector<double>> marginals);

  const ClassPartition& partition() const noexcept { return partition_; }
  const std::vector<double>& marginal(std::size_t c) const { return marginals_[c]; }
  const std::vector<std::vector<double>>& marginals() const noexcept { return marginals_; }

  /// The joint distribution prod_c marginal_c.
  BeliefState expand() const;

 private:
  ClassPartition partition_;
  std::vector<std::vector<double>> marginals_;
};

/// The simplifier S: exact class marginals of phi.
SimplifiedBelief project(const BeliefState& phi, const ClassPartition& partition);

/// S(phi) as a joint distribution.
BeliefState simplify(const BeliefState& phi, const ClassPartition& partition);

}  // namespace fpomdp
