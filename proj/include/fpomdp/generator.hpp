#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"

#include "fpomdp/model.hpp"

namespace fpomdp {

/// Random factored POMDP instance parameters.
struct GeneratorSpec {
  std::size_t num_vars = 2;
  std::size_t num_actions = 2;
  std::size_t num_observations = 2;
  /// Lower bound on the mixing coefficient of the generated model.
  double eta_min = 0.0;
  /// Weight of a deterministic state->observation map in each observation row.
  double obs_determinism = 0.5;
  double reward_lo = 0.0;
  double reward_hi = 1.0;
  double discount = 0.9;
  /// Parents per CPT, the variable itself included.
  std::size_t max_parents = 2;
  std::optional<std::vector<std::vector<std::size_t>>> classes;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument for out-of-range fields.
  void validate() const;
};

/// Deterministic in the spec. Every CPT entry is mixed with 1/2 using weight
/// eta_min^(1/n); the joint rows then share a uniform component of mass
/// eta_min, so mixing_coefficient(model) >= eta_min.
FactoredPomdp generate_model(const GeneratorSpec& spec);

GeneratorSpec generator_spec_from_json(const nlohmann::json& doc);

}  // namespace fpomdp
