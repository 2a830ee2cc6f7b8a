#include "fpomdp/partition.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fpomdp {

ClassPartition::ClassPartition(std::vector<std::vector<std::size_t>> classes, std::size_t num_vars)
    : classes_(std::move(classes)), num_vars_(num_vars) {
  if (num_vars_ == 0 || num_vars_ > kMaxVars) throw std::invalid_argument("ClassPartition: bad variable count");
  if (classes_.empty()) throw std::invalid_argument("ClassPartition: no classes");
  std::vector<bool> covered(num_vars_, false);
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    if (classes_[c].empty()) throw std::invalid_argument("ClassPartition: class " + std::to_string(c) + " is empty");
    for (std::size_t v : classes_[c]) {
      if (v >= num_vars_) throw std::invalid_argument("ClassPartition: variable index out of range");
      if (covered[v]) {
        throw std::invalid_argument("ClassPartition: variable " + std::to_string(v) + " appears twice");
      }
      covered[v] = true;
    }
  }
  for (std::size_t v = 0; v < num_vars_; ++v) {
    if (!covered[v]) throw std::invalid_argument("ClassPartition: variable " + std::to_string(v) + " not covered");
  }
}

ClassPartition ClassPartition::single(std::size_t num_vars) {
  std::vector<std::size_t> all(num_vars);
  for (std::size_t v = 0; v < num_vars; ++v) all[v] = v;
  return ClassPartition({all}, num_vars);
}

ClassPartition ClassPartition::singletons(std::size_t num_vars) {
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t v = 0; v < num_vars; ++v) classes.push_back({v});
  return ClassPartition(std::move(classes), num_vars);
}

ClassPartition ClassPartition::from_model(const FactoredPomdp& model) {
  if (model.classes()) return ClassPartition(*model.classes(), model.num_vars());
  return single(model.num_vars());
}

std::size_t ClassPartition::local_index(std::size_t c, StateIndex s) const {
  const auto& vars = classes_[c];
  std::size_t local = 0;
  for (std::size_t k = 0; k < vars.size(); ++k) local |= static_cast<std::size_t>(state_bit(s, vars[k])) << k;
  return local;
}

SimplifiedBelief::SimplifiedBelief(ClassPartition partition, std::vector<std::vector<double>> marginals)
    : partition_(std::move(partition)), marginals_(std::move(marginals)) {
  if (marginals_.size() != partition_.num_classes()) {
    throw std::invalid_argument("SimplifiedBelief: one marginal per class is required");
  }
  for (std::size_t c = 0; c < marginals_.size(); ++c) {
    if (marginals_[c].size() != partition_.class_size(c)) {
      throw std::invalid_argument("SimplifiedBelief: marginal " + std::to_string(c) + " has the wrong size");
    }
    double total = 0.0;
    for (double p : marginals_[c]) {
      if (!(p >= 0.0)) throw std::invalid_argument("SimplifiedBelief: negative marginal entry");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw std::invalid_argument("SimplifiedBelief: marginal " + std::to_string(c) + " sums to " +
                                  std::to_string(total));
    }
  }
}

BeliefState SimplifiedBelief::expand() const {
  const std::size_t states = std::size_t{1} << partition_.num_vars();
  std::vector<double> joint(states);
  for (StateIndex s = 0; s < states; ++s) {
    double p = 1.0;
    for (std::size_t c = 0; c < marginals_.size() && p != 0.0; ++c) p *= marginals_[c][partition_.local_index(c, s)];
    joint[s] = p;
  }
  return BeliefState(std::move(joint));
}

SimplifiedBelief project(const BeliefState& phi, const ClassPartition& partition) {
  const std::size_t states = std::size_t{1} << partition.num_vars();
  if (phi.size() != states) throw std::invalid_argument("project: belief size does not match the partition");
  std::vector<std::vector<double>> marginals(partition.num_classes());
  for (std::size_t c = 0; c < partition.num_classes(); ++c) {
    marginals[c].assign(partition.class_size(c), 0.0);
    for (StateIndex s = 0; s < states; ++s) {
      if (phi[s] != 0.0) marginals[c][partition.local_index(c, s)] += phi[s];
    }
  }
  return SimplifiedBelief(partition, std::move(marginals));
}

BeliefState simplify(const BeliefState& phi, const ClassPartition& partition) {
  return project(phi, partition).expand();
}

}  // namespace fpomdp
