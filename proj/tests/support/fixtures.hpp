#pragma once

#include <string>
#include <vector>

#include "fpomdp/model.hpp"
#include "fpomdp/model_io.hpp"

namespace fixtures {

inline fpomdp::VariableCpt cpt(std::vector<std::size_t> parents, std::vector<double> table) {
  return fpomdp::VariableCpt{std::move(parents), std::move(table)};
}

inline std::string source_path(const std::string& relative) { return std::string(FPOMDP_SOURCE_DIR) + "/" + relative; }

inline fpomdp::FactoredPomdp correlated_model() { return fpomdp::load_model(source_path("models/correlated2.json")); }

/// One variable that never leaves state 0; every state pays `reward`.
inline fpomdp::PomdpDefinition constant_definition(double reward, double gamma, std::size_t actions = 1) {
  fpomdp::PomdpDefinition def;
  def.num_vars = 1;
  for (std::size_t a = 0; a < actions; ++a) {
    def.actions.push_back("a" + std::to_string(a));
    def.transition.push_back({cpt({0}, {0.0, 0.0})});
  }
  def.observations = {"o"};
  def.observation_model = {{1.0}, {1.0}};
  def.rewards = {reward, reward};
  def.r_max = std::max(1.0, std::abs(reward));
  def.discount = gamma;
  def.initial_state = 0;
  return def;
}

/// Two variables that evolve and are observed independently of each other.
/// Observation o = o0 + 2 o1 where o_i is a noisy reading of variable i.
inline fpomdp::PomdpDefinition independent_definition() {
  fpomdp::PomdpDefinition def;
  def.num_vars = 2;
  def.actions = {"a0", "a1"};
  def.observations = {"00", "10", "01", "11"};
  def.transition = {{cpt({0}, {0.2, 0.7}), cpt({1}, {0.4, 0.9})}, {cpt({0}, {0.6, 0.1}), cpt({1}, {0.3, 0.5})}};
  const double hit0 = 0.8;
  const double hit1 = 0.65;
  for (std::size_t s = 0; s < 4; ++s) {
    std::vector<double> row(4);
    for (std::size_t o = 0; o < 4; ++o) {
      const double p0 = ((o & 1U) == (s & 1U)) ? hit0 : 1.0 - hit0;
      const double p1 = (((o >> 1) & 1U) == ((s >> 1) & 1U)) ? hit1 : 1.0 - hit1;
      row[o] = p0 * p1;
    }
    def.observation_model.push_back(row);
  }
  def.rewards = {0.0, 0.5, 0.25, 1.0};
  def.r_max = 1.0;
  def.discount = 0.9;
  def.initial_state = 1;
  def.classes = std::vector<std::vector<std::size_t>>{{0}, {1}};
  return def;
}

/// Action 1 moves to the reward-1 state and stays there; action 0 moves to
/// the reward-0 state.
inline fpomdp::PomdpDefinition dominant_definition() {
  fpomdp::PomdpDefinition def;
  def.num_vars = 1;
  def.actions = {"bad", "good"};
  def.observations = {"o0", "o1"};
  def.transition = {{cpt({0}, {0.0, 0.0})}, {cpt({0}, {1.0, 1.0})}};
  def.observation_model = {{0.7, 0.3}, {0.4, 0.6}};
  def.rewards = {0.0, 1.0};
  def.r_max = 1.0;
  def.discount = 0.9;
  def.initial_state = 0;
  return def;
}

}  // namespace fixtures
