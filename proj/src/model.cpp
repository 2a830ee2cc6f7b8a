#include "fpomdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace fpomdp {

namespace {

std::string indexed(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

// Builds the product distribution one variable at a time: after variable v,
// out[0 .. 2^(v+1)) holds the joint over variables 0..v.
void fill_product_row(const PomdpDefinition& def, ActionIndex a, StateIndex from, std::span<double> out) {
  out[0] = 1.0;
  for (std::size_t v = 0; v < def.num_vars; ++v) {
    const double one = def.transition[a][v].prob_one(from);
    const std::size_t half = std::size_t{1} << v;
    for (std::size_t low = 0; low < half; ++low) {
      const double base = out[low];
      out[low] = base * (1.0 - one);
      out[low + half] = base * one;
    }
  }
}

}  // namespace

StateIndex encode_state(std::span<const int> assignment, std::size_t num_vars) {
  if (assignment.size() != num_vars) {
    throw std::invalid_argument("encode_state: assignment has " + std::to_string(assignment.size()) +
                                " values, expected " + std::to_string(num_vars));
  }
  StateIndex s = 0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != 0 && assignment[i] != 1) {
      throw std::invalid_argument("encode_state: variable values must be 0 or 1");
    }
    s |= static_cast<StateIndex>(assignment[i]) << i;
  }
  return s;
}

std::vector<int> decode_state(StateIndex state, std::size_t num_vars) {
  if (num_vars < 64 && (state >> num_vars) != 0) {
    throw std::invalid_argument("decode_state: index out of range");
  }
  std::vector<int> bits(num_vars);
  for (std::size_t i = 0; i < num_vars; ++i) bits[i] = state_bit(state, i);
  return bits;
}

double VariableCpt::prob_one(StateIndex previous_state) const {
  std::size_t row = 0;
  for (std::size_t k = 0; k < parents.size(); ++k) {
    row |= static_cast<std::size_t>(state_bit(previous_state, parents[k])) << k;
  }
  return table[row];
}

FactoredPomdp::FactoredPomdp(PomdpDefinition definition) : def_(std::move(definition)) {
  validate();
  const std::size_t n_obs = num_observations();
  obs_flat_.resize(num_states() * n_obs);
  for (StateIndex s = 0; s < num_states(); ++s) {
    for (ObservationIndex o = 0; o < n_obs; ++o) obs_flat_[s * n_obs + o] = def_.observation_model[s][o];
  }
  if (def_.num_vars <= kDenseCacheVars) {
    dense_.reserve(num_actions());
    for (ActionIndex a = 0; a < num_actions(); ++a) dense_.push_back(build_transition(a));
  }
}

void FactoredPomdp::validate() const {
  if (def_.num_vars < 1 || def_.num_vars > kMaxVars) {
    throw ModelError("num_vars", "must be in [1, " + std::to_string(kMaxVars) + "], got " +
                                     std::to_string(def_.num_vars));
  }
  const std::size_t n = def_.num_vars;
  const std::size_t states = std::size_t{1} << n;

  if (def_.actions.empty()) throw ModelError("actions", "at least one action is required");
  if (def_.observations.empty()) throw ModelError("observations", "at least one observation is required");
  {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < def_.actions.size(); ++i) {
      if (!seen.insert(def_.actions[i]).second) throw ModelError(indexed("actions", i), "duplicate identifier");
    }
    seen.clear();
    for (std::size_t i = 0; i < def_.observations.size(); ++i) {
      if (!seen.insert(def_.observations[i]).second) {
        throw ModelError(indexed("observations", i), "duplicate identifier");
      }
    }
  }

  if (def_.transition.size() != def_.actions.size()) {
    throw ModelError("transition", "expected one entry per action (" + std::to_string(def_.actions.size()) + ")");
  }
  for (std::size_t a = 0; a < def_.transition.size(); ++a) {
    const std::string action_path = indexed("transition", a);
    if (def_.transition[a].size() != n) {
      throw ModelError(action_path, "expected one CPT per variable (" + std::to_string(n) + ")");
    }
    for (std::size_t v = 0; v < n; ++v) {
      const VariableCpt& cpt = def_.transition[a][v];
      const std::string cpt_path = indexed(action_path, v);
      std::set<std::size_t> unique_parents;
      for (std::size_t k = 0; k < cpt.parents.size(); ++k) {
        if (cpt.parents[k] >= n) {
          throw ModelError(indexed(cpt_path + ".parents", k), "variable index out of range");
        }
        if (!unique_parents.insert(cpt.parents[k]).second) {
          throw ModelError(indexed(cpt_path + ".parents", k), "duplicate parent");
        }
      }
      const std::size_t rows = std::size_t{1} << cpt.parents.size();
      if (cpt.table.size() != rows) {
        throw ModelError(cpt_path + ".table", "expected " + std::to_string(rows) + " entries");
      }
      for (std::size_t k = 0; k < rows; ++k) {
        if (!is_probability(cpt.table[k])) {
          throw ModelError(indexed(cpt_path + ".table", k), "probability must lie in [0, 1]");
        }
      }
    }
  }

  if (def_.observation_model.size() != states) {
    throw ModelError("observation_model", "expected " + std::to_string(states) + " rows");
  }
  for (std::size_t s = 0; s < states; ++s) {
    const auto& row = def_.observation_model[s];
    const std::string row_path = indexed("observation_model", s);
    if (row.size() != def_.observations.size()) {
      throw ModelError(row_path, "expected " + std::to_string(def_.observations.size()) + " entries");
    }
    double total = 0.0;
    for (std::size_t o = 0; o < row.size(); ++o) {
      if (!is_probability(row[o])) throw ModelError(indexed(row_path, o), "probability must lie in [0, 1]");
      total += row[o];
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw ModelError(row_path, "row sums to " + std::to_string(total) + ", expected 1");
    }
  }

  if (!std::isfinite(def_.r_max) || def_.r_max < 0.0) throw ModelError("r_max", "must be finite and >= 0");
  if (def_.rewards.size() != states) {
    throw ModelError("rewards", "expected " + std::to_string(states) + " entries");
  }
  for (std::size_t s = 0; s < states; ++s) {
    if (!std::isfinite(def_.rewards[s]) || std::abs(def_.rewards[s]) > def_.r_max) {
      throw ModelError(indexed("rewards", s), "|R_s| exceeds r_max");
    }
  }
  if (!(def_.discount >= 0.0 && def_.discount < 1.0)) {
    throw ModelError("discount", "must lie in [0, 1)");
  }
  if (def_.initial_state >= states) throw ModelError("initial_state", "must be < 2^num_vars");

  if (def_.classes) {
    const auto& classes = *def_.classes;
    if (classes.empty()) throw ModelError("classes", "at least one class is required");
    std::vector<bool> covered(n, false);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const std::string class_path = indexed("classes", c);
      if (classes[c].empty()) throw ModelError(class_path, "class is empty");
      for (std::size_t k = 0; k < classes[c].size(); ++k) {
        const std::size_t v = classes[c][k];
        if (v >= n) throw ModelError(indexed(class_path, k), "variable index out of range");
        if (covered[v]) throw ModelError(indexed(class_path, k), "variable assigned to more than one class");
        covered[v] = true;
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (!covered[v]) throw ModelError("classes", "variable " + std::to_string(v) + " is not covered");
    }
  }
}

double FactoredPomdp::transition_prob(ActionIndex a, StateIndex from, StateIndex to) const {
  if (!dense_.empty()) return dense_[a](from, to);
  double p = 1.0;
  for (std::size_t v = 0; v < def_.num_vars; ++v) {
    const double one = def_.transition[a][v].prob_one(from);
    p *= state_bit(to, v) ? one : 1.0 - one;
  }
  return p;
}

void FactoredPomdp::transition_row(ActionIndex a, StateIndex from, std::span<double> out) const {
  if (!dense_.empty()) {
    const auto row = dense_[a].row(from);
    std::copy(row.begin(), row.end(), out.begin());
    return;
  }
  fill_product_row(def_, a, from, out);
}

TransitionMatrix FactoredPomdp::build_transition(ActionIndex a) const {
  TransitionMatrix matrix(num_states());
  for (StateIndex from = 0; from < num_states(); ++from) fill_product_row(def_, a, from, matrix.row(from));
  return matrix;
}

TransitionMatrix materialize_transition(const FactoredPomdp& model, ActionIndex a) {
  if (a >= model.num_actions()) throw std::out_of_range("materialize_transition: action out of range");
  if (const TransitionMatrix* cached = model.dense_transition(a)) return *cached;
  TransitionMatrix matrix(model.num_states());
  for (StateIndex from = 0; from < model.num_states(); ++from) model.transition_row(a, from, matrix.row(from));
  return matrix;
}

}  // namespace fpomdp
