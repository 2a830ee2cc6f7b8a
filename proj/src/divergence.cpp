#include "fpomdp/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fpomdp {

double kl_divergence(std::span<const double> p, std::span<const double> q, LogBase base) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    sum += p[i] * std::log(p[i] / q[i]);
  }
  // Round-off can push a true zero slightly negative.
  sum = std::max(sum, 0.0);
  return base == LogBase::bits ? sum / std::numbers::ln2 : sum;
}

double l1_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("l1_distance: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return sum;
}

double mixing_coefficient(const FactoredPomdp& model) {
  const std::size_t states = model.num_states();
  double eta = 1.0;
  for (ActionIndex a = 0; a < model.num_actions(); ++a) {
    const TransitionMatrix matrix = materialize_transition(model, a);
    for (StateIndex s1 = 0; s1 < states; ++s1) {
      const auto row1 = matrix.row(s1);
      for (StateIndex s2 = s1 + 1; s2 < states; ++s2) {
        const auto row2 = matrix.row(s2);
        double overlap = 0.0;
        for (StateIndex s3 = 0; s3 < states; ++s3) overlap += std::min(row1[s3], row2[s3]);
        eta = std::min(eta, overlap);
      }
    }
  }
  return std::clamp(eta, 0.0, 1.0);
}

double max_transition_row_distance(const FactoredPomdp& model) {
  const std::size_t states = model.num_states();
  double worst = 0.0;
  for (ActionIndex a = 0; a < model.num_actions(); ++a) {
    const TransitionMatrix matrix = materialize_transition(model, a);
    for (StateIndex s1 = 0; s1 < states; ++s1) {
      for (StateIndex s2 = s1 + 1; s2 < states; ++s2) {
        worst = std::max(worst, l1_distance(matrix.row(s1), matrix.row(s2)));
      }
    }
  }
  return worst;
}

}  // namespace fpomdp
