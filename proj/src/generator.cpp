#include "fpomdp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpomdp/model_io.hpp"
#include "fpomdp/rng.hpp"

namespace fpomdp {

void GeneratorSpec::validate() const {
  if (num_vars < 1 || num_vars > kMaxVars) throw std::invalid_argument("generator: num_vars must be in [1, 20]");
  if (num_actions < 1) throw std::invalid_argument("generator: num_actions must be >= 1");
  if (num_observations < 1) throw std::invalid_argument("generator: num_observations must be >= 1");
  if (!(eta_min >= 0.0 && eta_min <= 1.0)) throw std::invalid_argument("generator: eta_min must lie in [0, 1]");
  if (!(obs_determinism >= 0.0 && obs_determinism <= 1.0)) {
    throw std::invalid_argument("generator: obs_determinism must lie in [0, 1]");
  }
  if (!(reward_lo <= reward_hi) || !std::isfinite(reward_lo) || !std::isfinite(reward_hi)) {
    throw std::invalid_argument("generator: reward range is invalid");
  }
  if (!(discount >= 0.0 && discount < 1.0)) throw std::invalid_argument("generator: discount must lie in [0, 1)");
  if (max_parents < 1) throw std::invalid_argument("generator: max_parents must be >= 1");
}

namespace {

std::vector<std::vector<std::size_t>> default_classes(std::size_t n) {
  if (n == 1) return {{0}};
  std::vector<std::vector<std::size_t>> classes(2);
  for (std::size_t v = 0; v < n; ++v) classes[v < (n + 1) / 2 ? 0 : 1].push_back(v);
  return classes;
}

}  // namespace

FactoredPomdp generate_model(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, {stream_label::kGenerator}));
  const std::size_t n = spec.num_vars;
  const std::size_t states = std::size_t{1} << n;
  const double mix = std::pow(spec.eta_min, 1.0 / static_cast<double>(n));

  PomdpDefinition def;
  def.num_vars = n;
  for (std::size_t a = 0; a < spec.num_actions; ++a) def.actions.push_back("a" + std::to_string(a));
  for (std::size_t o = 0; o < spec.num_observations; ++o) def.observations.push_back("o" + std::to_string(o));

  for (std::size_t a = 0; a < spec.num_actions; ++a) {
    std::vector<VariableCpt> cpts;
    for (std::size_t v = 0; v < n; ++v) {
      VariableCpt cpt;
      cpt.parents.push_back(v);
      std::vector<std::size_t> others;
      for (std::size_t u = 0; u < n; ++u) {
        if (u != v) others.push_back(u);
      }
      const std::size_t extra = std::min(spec.max_parents - 1, others.size());
      for (std::size_t k = 0; k < extra; ++k) {
        const std::size_t pick = k + rng.index(others.size() - k);
        std::swap(others[k], others[pick]);
        cpt.parents.push_back(others[k]);
      }
      std::sort(cpt.parents.begin() + 1, cpt.parents.end());
      const std::size_t rows = std::size_t{1} << cpt.parents.size();
      for (std::size_t r = 0; r < rows; ++r) {
        // Half of the entries are near-deterministic so that parents across
        // classes induce real correlation.
        double p = rng.uniform();
        if (rng.uniform() < 0.5) p = p < 0.5 ? 0.15 * p : 1.0 - 0.15 * (1.0 - p);
        cpt.table.push_back((1.0 - mix) * p + mix * 0.5);
      }
      cpts.push_back(std::move(cpt));
    }
    def.transition.push_back(std::move(cpts));
  }

  const std::size_t n_obs = spec.num_observations;
  for (std::size_t s = 0; s < states; ++s) {
    std::vector<double> noise(n_obs);
    double total = 0.0;
    for (double& w : noise) {
      w = -std::log(1.0 - rng.uniform());
      total += w;
    }
    const std::size_t signal = rng.index(n_obs);
    std::vector<double> row(n_obs);
    for (std::size_t o = 0; o < n_obs; ++o) {
      row[o] = (1.0 - spec.obs_determinism) * noise[o] / total + (o == signal ? spec.obs_determinism : 0.0);
    }
    double row_total = 0.0;
    for (double p : row) row_total += p;
    for (double& p : row) p /= row_total;
    def.observation_model.push_back(std::move(row));
  }

  for (std::size_t s = 0; s < states; ++s) {
    def.rewards.push_back(spec.reward_lo + (spec.reward_hi - spec.reward_lo) * rng.uniform());
  }
  def.r_max = std::max(std::abs(spec.reward_lo), std::abs(spec.reward_hi));
  def.discount = spec.discount;
  def.initial_state = rng.index(states);
  def.classes = spec.classes ? *spec.classes : default_classes(n);
  return FactoredPomdp(std::move(def));
}

GeneratorSpec generator_spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("generator spec must be an object");
  GeneratorSpec spec;
  spec.num_vars = doc.value("num_vars", spec.num_vars);
  spec.num_actions = doc.value("num_actions", spec.num_actions);
  spec.num_observations = doc.value("num_observations", spec.num_observations);
  spec.eta_min = doc.value("eta_min", spec.eta_min);
  spec.obs_determinism = doc.value("obs_determinism", spec.obs_determinism);
  spec.reward_lo = doc.value("reward_lo", spec.reward_lo);
  spec.reward_hi = doc.value("reward_hi", spec.reward_hi);
  spec.discount = doc.value("discount", spec.discount);
  spec.max_parents = doc.value("max_parents", spec.max_parents);
  spec.seed = doc.value("seed", spec.seed);
  if (const auto classes = doc.find("classes"); classes != doc.end() && !classes->is_null()) {
    spec.classes = index_lists_from_json(*classes, "classes");
  }
  spec.validate();
  return spec;
}

}  // namespace fpomdp
