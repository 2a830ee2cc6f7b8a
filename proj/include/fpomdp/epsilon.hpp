#pragma once

#include <cstdint>
#include <string>

#include "fpomdp/partition.hpp"
#include "fpomdp/policy.hpp"

namespace fpomdp {

enum class DivergenceKind { kl, l1 };

std::string to_string(DivergenceKind kind);

/// Measured simplification error. `max` is the definitional epsilon (worst
/// case over the visited set); `mean` is kept for diagnosis.
struct EpsilonEstimate {
  DivergenceKind kind = DivergenceKind::l1;
  double max = 0.0;
  double mean = 0.0;
  std::size_t samples = 0;
  std::size_t depth = 0;
  std::uint64_t seed = 0;
  bool exhaustive = false;

  double value() const noexcept { return max; }
};

struct L1SamplerConfig {
  std::size_t depth = 3;
  /// Enumerate every reachable pre-simplified belief when the history tree
  /// has at most this many nodes; otherwise sample trajectories.
  std::size_t node_cap = 100000;
  std::size_t episodes = 1000;
  std::uint64_t seed = 0;
  /// Policy for sampled trajectories; nullptr means uniform random actions.
  const Policy* policy = nullptr;
  unsigned workers = 0;
};

/// L1 epsilon: max of ||U(phi,<a,o>) - S(U(phi,<a,o>))||_1 over simplified
/// beliefs phi reachable from S(delta(s0)) within `depth` updates, together
/// with the initial term ||delta(s0) - S(delta(s0))||_1.
EpsilonEstimate measure_l1_eps(const FactoredPomdp& model, const ClassPartition& partition,
                               const L1SamplerConfig& config);

/// KL epsilon in nats: max over steps of D(psi || S(phi)) - D(psi || phi),
/// psi = beta(rho;<a,o>) and phi = U(beta_hat(rho), <a,o>), along histories
/// produced by running `policy` in the true POMDP. Terms keep their sign.
EpsilonEstimate measure_kl_eps(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                               std::size_t horizon, std::size_t episodes, std::uint64_t seed, unsigned workers = 0);

/// The signed KL gap for one step. Both divergences infinite yields +infinity.
double kl_gap(const BeliefState& psi, const BeliefState& pre_simplified, const BeliefState& simplified);

}  // namespace fpomdp
