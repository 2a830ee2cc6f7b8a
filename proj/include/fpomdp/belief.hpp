#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fpomdp/model.hpp"

namespace fpomdp {

/// Raised when conditioning on an observation whose probability is <= 1e-300.
class ZeroObservationProbability : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kZeroProbability = 1e-300;

/// Dense distribution over the 2^n joint states.
///
/// Construction rejects negative entries and sums off by more than 1e-6, and
/// renormalizes when the sum is off by more than 1e-12.
class BeliefState {
 public:
  BeliefState() = default;
  explicit BeliefState(std::vector<double> probs);

  /// Divides by the sum. The input must have positive total mass.
  static BeliefState normalized(std::vector<double> weights);
  static BeliefState point_mass(std::size_t num_states, StateIndex s);
  static BeliefState uniform(std::size_t num_states);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](StateIndex s) const { return probs_[s]; }
  std::span<const double> probs() const noexcept { return probs_; }

  friend bool operator==(const BeliefState&, const BeliefState&) = default;

 private:
  std::vector<double> probs_;
};

/// A sequence of (action, observation) pairs.
struct History {
  std::vector<std::pair<ActionIndex, ObservationIndex>> steps;

  std::size_t size() const noexcept { return steps.size(); }
  bool empty() const noexcept { return steps.empty(); }
  History extended(ActionIndex a, ObservationIndex o) const {
    History next = *this;
    next.steps.emplace_back(a, o);
    return next;
  }
  friend bool operator==(const History&, const History&) = default;
  friend auto operator<=>(const History&, const History&) = default;
};

/// Order-sensitive 64-bit digest of a history.
std::uint64_t hash_history(const History& history);

/// Throws std::out_of_range if any index is invalid for `model`.
void check_history(const FactoredPomdp& model, const History& history);

/// phi * T_a: the predicted distribution over next states.
std::vector<double> predict(const FactoredPomdp& model, const BeliefState& phi, ActionIndex a);

/// P(o | a, phi) = sum_{s'} sum_s phi(s) P(s'|a,s) P(o|s').
double obs_probability(const FactoredPomdp& model, const BeliefState& phi, ActionIndex a, ObservationIndex o);

/// The full distribution P(. | a, phi) over observations.
std::vector<double> observation_distribution(const FactoredPomdp& model, const BeliefState& phi, ActionIndex a);

/// Same, from an already predicted next-state distribution.
std::vector<double> observation_distribution_from_prediction(const FactoredPomdp& model,
                                                             std::span<const double> predicted);

/// Bayes update U(phi, <a, o>). Throws ZeroObservationProbability.
BeliefState belief_update(const FactoredPomdp& model, const BeliefState& phi, ActionIndex a, ObservationIndex o);

/// Posterior for observation o given phi * T_a.
BeliefState posterior_from_prediction(const FactoredPomdp& model, std::span<const double> predicted,
                                      ObservationIndex o);

/// sum_s phi(s) R_s.
double expected_reward(const FactoredPomdp& model, const BeliefState& phi);

/// Point mass on the initial state.
BeliefState dirac_belief(const FactoredPomdp& model);

/// Exact belief along a history starting from the initial point mass.
BeliefState belief_after(const FactoredPomdp& model, const History& history);

}  // namespace fpomdp
