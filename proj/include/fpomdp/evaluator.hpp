#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpomdp/partition.hpp"
#include "fpomdp/policy.hpp"

namespace fpomdp {

/// R_max / (1 - gamma): the largest achievable discounted return.
inline double v_max(double r_max, double gamma) { return r_max / (1.0 - gamma); }

/// Sum_{t < T_sim} gamma^t r_t of one simulated episode. The policy sees the
/// evolving simplified belief and the history.
double rollout_return(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                      std::size_t t_sim, std::uint64_t seed);

struct ValueEstimate {
  double mean = 0.0;
  double half_width = 0.0;  // 95% normal-approximation CI
  double stddev = 0.0;
  std::size_t episodes = 0;
};

/// Mean discounted return over independent episodes (episode e uses
/// episode_seed(seed, e)). Requires episodes >= 2.
ValueEstimate estimate_value(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                             std::size_t episodes, std::size_t t_sim, std::uint64_t seed, unsigned workers = 0);

/// Sample statistics used by every per-t report.
struct SampleStats {
  double mean = 0.0;
  double max = 0.0;
  double std_error = 0.0;
};
SampleStats summarize(const std::vector<double>& values);

/// Per-t distance between beta(rho) and beta_hat(rho) along histories of the
/// true POMDP. KL is in nats.
struct DriftTrace {
  struct Row {
    std::size_t t = 0;
    SampleStats l1;
    SampleStats kl;
  };
  std::vector<Row> rows;  // t = 0 .. T
  std::size_t episodes = 0;
  std::string policy;
  std::uint64_t seed = 0;
};

DriftTrace drift_trace(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                       std::size_t episodes, std::size_t horizon, std::uint64_t seed, unsigned workers = 0);

}  // namespace fpomdp
