#include "fpomdp/belief.hpp"

#include <cmath>
#include <string>

#include "fpomdp/rng.hpp"

namespace fpomdp {

BeliefState::BeliefState(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("BeliefState: empty distribution");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("BeliefState: entries must be finite and non-negative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw std::invalid_argument("BeliefState: entries sum to " + std::to_string(total));
  }
  if (std::abs(total - 1.0) > 1e-12) {
    for (double& p : probs_) p /= total;
  }
}

BeliefState BeliefState::normalized(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("BeliefState::normalized: total mass must be positive");
  }
  for (double& w : weights) w /= total;
  return BeliefState(std::move(weights));
}

BeliefState BeliefState::point_mass(std::size_t num_states, StateIndex s) {
  if (s >= num_states) throw std::out_of_range("BeliefState::point_mass: state out of range");
  std::vector<double> probs(num_states, 0.0);
  probs[s] = 1.0;
  return BeliefState(std::move(probs));
}

BeliefState BeliefState::uniform(std::size_t num_states) {
  return BeliefState(std::vector<double>(num_states, 1.0 / static_cast<double>(num_states)));
}

std::uint64_t hash_history(const History& history) {
  std::uint64_t h = mix64(stream_label::kHistory ^ history.size());
  for (const auto& [a, o] : history.steps) h = derive_seed(h, {a, o});
  return h;
}

void check_history(const FactoredPomdp& model, const History& history) {
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto [a, o] = history.steps[i];
    if (a >= model.num_actions() || o >= model.num_observations()) {
      throw std::out_of_range("history step " + std::to_string(i) + " has an out-of-range index");
    }
  }
}

std::vector<double> predict(const FactoredPomdp& model, const BeliefState& phi, ActionIndex a) {
  if (a >= model.num_actions()) throw std::out_of_range("predict: action out of range");
  if (phi.size() != model.num_states()) throw std::invalid_argument("predict: belief size mismatch");
  const std::size_t states = model.num_states();
  std::vector<double> next(states, 0.0);
  if (const TransitionMatrix* dense = model.dense_transition(a)) {
    for (StateIndex s = 0; s < states; ++s) {
      const double w = phi[s];
      if (w == 0.0) continue;
      const auto row = dense->row(s);
      for (StateIndex t = 0; t < states; ++t) next[t] += w * row[t];
    }
    return next;
  }
  std::vector<double> row(states);
  for (StateIndex s = 0; s < states; ++s) {
    const double w = phi[s];
    if (w == 0.0) continue;
    model.transition_row(a, s, row);
    for (StateIndex t = 0; t < states; ++t) next[t] += w * row[t];
  }
  return next;
}

std::vector<double> observation_distribution_from_prediction(const FactoredPomdp& model,
                                                             std::span<const double> predicted) {
  std::vector<double> dist(model.num_observations(), 0.0);
  for (StateIndex t = 0; t < predicted.size(); ++t) {
    const double w = predicted[t];
    if (w == 0.0) continue;
    const auto row = model.observation_row(t);
    for (ObservationIndex o = 0; o < dist.size(); ++o) dist[o] += w * row[o];
  }
  return dist;
}

std::vector<double> observation_distribution(const FactoredPomdp& model, const BeliefState& phi, ActionIndex a) {
  return observation_distribution_from_prediction(model, predict(model, phi, a));
}

double obs_probability(const FactoredPomdp& model, const BeliefState& phi, ActionIndex a, ObservationIndex o) {
  if (o >= model.num_observations()) throw std::out_of_range("obs_probability: observation out of range");
  const auto predicted = predict(model, phi, a);
  double p = 0.0;
  for (StateIndex t = 0; t < predicted.size(); ++t) p += predicted[t] * model.observation_prob(t, o);
  return p;
}

BeliefState posterior_from_prediction(const FactoredPomdp& model, std::span<const double> predicted,
                                      ObservationIndex o) {
  if (o >= model.num_observations()) throw std::out_of_range("belief_update: observation out of range");
  std::vector<double> joint(predicted.size());
  double evidence = 0.0;
  for (StateIndex t = 0; t < predicted.size(); ++t) {
    joint[t] = predicted[t] * model.observation_prob(t, o);
    evidence += joint[t];
  }
  if (evidence <= kZeroProbability) {
    throw ZeroObservationProbability("observation " + std::to_string(o) + " has probability " +
                                     std::to_string(evidence) + " under the current belief");
  }
  for (double& p : joint) p /= evidence;
  return BeliefState(std::move(joint));
}

BeliefState belief_update(const FactoredPomdp& model, const BeliefState& phi, ActionIndex a, ObservationIndex o) {
  return posterior_from_prediction(model, predict(model, phi, a), o);
}

double expected_reward(const FactoredPomdp& model, const BeliefState& phi) {
  if (phi.size() != model.num_states()) throw std::invalid_argument("expected_reward: belief size mismatch");
  double r = 0.0;
  for (StateIndex s = 0; s < phi.size(); ++s) r += phi[s] * model.reward(s);
  return r;
}

BeliefState dirac_belief(const FactoredPomdp& model) {
  return BeliefState::point_mass(model.num_states(), model.initial_state());
}

BeliefState belief_after(const FactoredPomdp& model, const History& history) {
  check_history(model, history);
  BeliefState belief = dirac_belief(model);
  for (const auto& [a, o] : history.steps) belief = belief_update(model, belief, a, o);
  return belief;
}

}  // namespace fpomdp
