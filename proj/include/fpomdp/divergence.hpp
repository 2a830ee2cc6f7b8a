#pragma once

#include <span>

#include "fpomdp/model.hpp"

namespace fpomdp {

enum class LogBase { nats, bits };

/// D(P || Q) = sum_x P(x) log(P(x) / Q(x)). Terms with P(x) = 0 vanish; any
/// x with P(x) > 0 and Q(x) = 0 makes the result +infinity. Computed in nats,
/// bits divide by ln 2. Throws std::invalid_argument on size mismatch.
double kl_divergence(std::span<const double> p, std::span<const double> q, LogBase base = LogBase::nats);

/// sum_x |P(x) - Q(x)|.
double l1_distance(std::span<const double> p, std::span<const double> q);

/// min over actions and state pairs of sum_s3 min(P(s3|a,s1), P(s3|a,s2)).
double mixing_coefficient(const FactoredPomdp& model);

/// max over actions and state pairs of ||P(.|a,s1) - P(.|a,s2)||_1.
/// Equals 2 - 2 * mixing_coefficient(model).
double max_transition_row_distance(const FactoredPomdp& model);

}  // namespace fpomdp
