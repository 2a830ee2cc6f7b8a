#pragma once

// Brute-force reference implementations used by the unit and acceptance
// tests. They work on plain nested vectors and share no code with the
// library beyond reading a model definition.

#include <cstdint>
#include <random>
#include <vector>

#include "fpomdp/model.hpp"

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;
using Classes = std::vector<std::vector<std::size_t>>;

/// Joint tables rebuilt directly from the CPTs.
struct Dense {
  std::size_t n = 0;
  std::size_t S = 0;
  std::size_t A = 0;
  std::size_t O = 0;
  std::vector<Mat> T;  // [a][s][s']
  Mat Z;               // [s][o]
  Vec R;
  double gamma = 0.0;
  std::size_t s0 = 0;
};

Dense dense(const fpomdp::FactoredPomdp& model);

double obs_prob(const Dense& m, const Vec& b, std::size_t a, std::size_t o);
/// Returns an empty vector when the observation has zero probability.
Vec bayes(const Dense& m, const Vec& b, std::size_t a, std::size_t o);
double reward(const Dense& m, const Vec& b);

/// Product of class marginals, computed by summing the joint per class value.
Vec product_of_marginals(const Vec& b, const Classes& classes, std::size_t n);
std::vector<Vec> marginals(const Vec& b, const Classes& classes, std::size_t n);

double kl(const Vec& p, const Vec& q);
double l1(const Vec& p, const Vec& q);
double mixing(const Dense& m);

/// Finite-horizon expectimax. With `classes` non-empty every belief, the
/// root included, is replaced by its product of marginals.
struct Expectimax {
  double value = 0.0;
  std::vector<double> q;
};
Expectimax expectimax(const Dense& m, const Vec& b, std::size_t depth, double gamma, const Classes& classes);

/// Max ||U(phi) - S(U(phi))||_1 over every simplified belief reachable within
/// `depth` updates of S(delta(s0)), including ||delta(s0) - S(delta(s0))||_1.
double l1_eps_exhaustive(const Dense& m, const Classes& classes, std::size_t depth);

/// Max over every history of length <= depth with positive true probability
/// of D(psi || S(phi)) - D(psi || phi), psi = beta(rho;<a,o>), phi = U(beta_hat(rho), <a,o>).
double kl_eps_exhaustive(const Dense& m, const Classes& classes, std::size_t depth);

/// Expected per-t ||beta - beta_hat||_1 and D(beta || beta_hat) under a fixed
/// action, by enumerating every observation sequence.
struct DriftExpectation {
  Vec l1;
  Vec kl;
};
DriftExpectation fixed_action_drift(const Dense& m, const Classes& classes, std::size_t action, std::size_t horizon);

/// Expected sum_{t<T} gamma^t R(s_t) of the hidden chain under a fixed action.
double fixed_action_return(const Dense& m, std::size_t action, std::size_t t_sim);

/// Random instances.
fpomdp::PomdpDefinition random_definition(std::mt19937_64& rng, std::size_t n, std::size_t actions,
                                          std::size_t observations, double discount = 0.9);
Vec random_distribution(std::mt19937_64& rng, std::size_t size, double zero_fraction = 0.0);
Classes random_partition(std::mt19937_64& rng, std::size_t n);

}  // namespace oracle
