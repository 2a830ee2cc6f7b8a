#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpomdp {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;
using ObservationIndex = std::size_t;

/// Joint materialization is 2^n, so the variable count is capped.
inline constexpr std::size_t kMaxVars = 20;

/// Models up to this many variables keep dense transition matrices in memory.
inline constexpr std::size_t kDenseCacheVars = 10;

/// Raised for any violated model invariant. `path()` points into the model
/// document, e.g. `observation_model[3]`.
class ModelError : public std::runtime_error {
 public:
  ModelError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Little-endian packing: variable i contributes bit i.
StateIndex encode_state(std::span<const int> assignment, std::size_t num_vars);
std::vector<int> decode_state(StateIndex state, std::size_t num_vars);

inline int state_bit(StateIndex state, std::size_t var) { return static_cast<int>((state >> var) & 1U); }

/// P(v' = 1 | action, parents). The table is indexed by the parent
/// assignment packed little-endian in the order of `parents`.
struct VariableCpt {
  std::vector<std::size_t> parents;
  std::vector<double> table;

  double prob_one(StateIndex previous_state) const;
};

/// Dense |S| x |S| row-stochastic matrix, row-major.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  explicit TransitionMatrix(std::size_t num_states)
      : num_states_(num_states), data_(num_states * num_states, 0.0) {}

  std::size_t num_states() const noexcept { return num_states_; }
  double operator()(StateIndex from, StateIndex to) const { return data_[from * num_states_ + to]; }
  double& operator()(StateIndex from, StateIndex to) { return data_[from * num_states_ + to]; }
  std::span<const double> row(StateIndex from) const {
    return {data_.data() + from * num_states_, num_states_};
  }
  std::span<double> row(StateIndex from) { return {data_.data() + from * num_states_, num_states_}; }

 private:
  std::size_t num_states_ = 0;
  std::vector<double> data_;
};

/// Plain description of a factored POMDP, mirroring the model document.
struct PomdpDefinition {
  std::size_t num_vars = 0;
  std::vector<std::string> actions;
  std::vector<std::string> observations;
  std::vector<std::vector<VariableCpt>> transition;  // [action][variable]
  std::vector<std::vector<double>> observation_model;  // [state][observation]
  std::vector<double> rewards;                          // [state]
  double r_max = 0.0;
  double discount = 0.0;
  StateIndex initial_state = 0;
  std::optional<std::vector<std::vector<std::size_t>>> classes;
};

/// Validated, immutable factored POMDP over binary state variables.
///
/// Variables transition independently given the full previous joint state and
/// the action (a two-slice DBN without intra-slice arcs). Rewards are attached
/// to the state occupied when acting.
class FactoredPomdp {
 public:
  /// Validates every invariant; throws ModelError naming the first violation.
  explicit FactoredPomdp(PomdpDefinition definition);

  const PomdpDefinition& definition() const noexcept { return def_; }

  std::size_t num_vars() const noexcept { return def_.num_vars; }
  std::size_t num_states() const noexcept { return std::size_t{1} << def_.num_vars; }
  std::size_t num_actions() const noexcept { return def_.actions.size(); }
  std::size_t num_observations() const noexcept { return def_.observations.size(); }
  double r_max() const noexcept { return def_.r_max; }
  double discount() const noexcept { return def_.discount; }
  StateIndex initial_state() const noexcept { return def_.initial_state; }
  const std::optional<std::vector<std::vector<std::size_t>>>& classes() const noexcept {
    return def_.classes;
  }

  double reward(StateIndex s) const { return def_.rewards[s]; }
  std::span<const double> rewards() const noexcept { return def_.rewards; }

  /// P(o | s).
  double observation_prob(StateIndex s, ObservationIndex o) const {
    return obs_flat_[s * num_observations() + o];
  }
  std::span<const double> observation_row(StateIndex s) const {
    return {obs_flat_.data() + s * num_observations(), num_observations()};
  }

  /// P(s' | a, s).
  double transition_prob(ActionIndex a, StateIndex from, StateIndex to) const;

  /// Fills `out` (length |S|) with the row P(. | a, from).
  void transition_row(ActionIndex a, StateIndex from, std::span<double> out) const;

  /// Cached dense matrix when num_vars <= kDenseCacheVars, otherwise nullptr.
  const TransitionMatrix* dense_transition(ActionIndex a) const {
    return dense_.empty() ? nullptr : &dense_[a];
  }

 private:
  void validate() const;
  TransitionMatrix build_transition(ActionIndex a) const;

  PomdpDefinition def_;
  std::vector<double> obs_flat_;
  std::vector<TransitionMatrix> dense_;
};

/// T_a[s][s'] = prod_v P(v' = bit_v(s') | a, parents(s)).
TransitionMatrix materialize_transition(const FactoredPomdp& model, ActionIndex a);

}  // namespace fpomdp
