#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace oracle {

namespace {

int bit(std::size_t s, std::size_t v) { return static_cast<int>((s >> v) & 1U); }

std::size_t class_value(std::size_t s, const std::vector<std::size_t>& vars) {
  std::size_t value = 0;
  for (std::size_t k = 0; k < vars.size(); ++k) value |= static_cast<std::size_t>(bit(s, vars[k])) << k;
  return value;
}

}  // namespace

Dense dense(const fpomdp::FactoredPomdp& model) {
  const auto& def = model.definition();
  Dense m;
  m.n = def.num_vars;
  m.S = std::size_t{1} << m.n;
  m.A = def.actions.size();
  m.O = def.observations.size();
  m.gamma = def.discount;
  m.s0 = def.initial_state;
  m.R = def.rewards;
  m.Z = def.observation_model;
  m.T.assign(m.A, Mat(m.S, Vec(m.S, 0.0)));
  for (std::size_t a = 0; a < m.A; ++a) {
    for (std::size_t s = 0; s < m.S; ++s) {
      for (std::size_t t = 0; t < m.S; ++t) {
        double p = 1.0;
        for (std::size_t v = 0; v < m.n; ++v) {
          const auto& cpt = def.transition[a][v];
          std::size_t row = 0;
          for (std::size_t k = 0; k < cpt.parents.size(); ++k) {
            row += static_cast<std::size_t>(bit(s, cpt.parents[k])) << k;
          }
          const double one = cpt.table[row];
          p *= bit(t, v) ? one : 1.0 - one;
        }
        m.T[a][s][t] = p;
      }
    }
  }
  return m;
}

double obs_prob(const Dense& m, const Vec& b, std::size_t a, std::size_t o) {
  double total = 0.0;
  for (std::size_t s = 0; s < m.S; ++s) {
    for (std::size_t t = 0; t < m.S; ++t) total += b[s] * m.T[a][s][t] * m.Z[t][o];
  }
  return total;
}

Vec bayes(const Dense& m, const Vec& b, std::size_t a, std::size_t o) {
  Vec joint(m.S, 0.0);
  for (std::size_t t = 0; t < m.S; ++t) {
    for (std::size_t s = 0; s < m.S; ++s) joint[t] += b[s] * m.T[a][s][t] * m.Z[t][o];
  }
  const double z = std::accumulate(joint.begin(), joint.end(), 0.0);
  if (z <= 0.0) return {};
  for (double& x : joint) x /= z;
  return joint;
}

double reward(const Dense& m, const Vec& b) {
  double r = 0.0;
  for (std::size_t s = 0; s < m.S; ++s) r += b[s] * m.R[s];
  return r;
}

std::vector<Vec> marginals(const Vec& b, const Classes& classes, std::size_t n) {
  std::vector<Vec> out;
  for (const auto& vars : classes) {
    Vec marginal(std::size_t{1} << vars.size(), 0.0);
    for (std::size_t s = 0; s < (std::size_t{1} << n); ++s) marginal[class_value(s, vars)] += b[s];
    out.push_back(std::move(marginal));
  }
  return out;
}

Vec product_of_marginals(const Vec& b, const Classes& classes, std::size_t n) {
  const auto parts = marginals(b, classes, n);
  Vec out(std::size_t{1} << n, 1.0);
  for (std::size_t s = 0; s < out.size(); ++s) {
    for (std::size_t c = 0; c < classes.size(); ++c) out[s] *= parts[c][class_value(s, classes[c])];
  }
  return out;
}

double kl(const Vec& p, const Vec& q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log(p[i] / q[i]);
  }
  return d;
}

double l1(const Vec& p, const Vec& q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += std::fabs(p[i] - q[i]);
  return d;
}

double mixing(const Dense& m) {
  double eta = 1.0;
  for (const auto& T : m.T) {
    for (std::size_t s1 = 0; s1 < m.S; ++s1) {
      for (std::size_t s2 = 0; s2 < m.S; ++s2) {
        double overlap = 0.0;
        for (std::size_t t = 0; t < m.S; ++t) overlap += std::min(T[s1][t], T[s2][t]);
        eta = std::min(eta, overlap);
      }
    }
  }
  return eta;
}

namespace {

double expectimax_value(const Dense& m, const Vec& b, std::size_t depth, double gamma, const Classes& classes,
                        Vec* root_q) {
  const double r = reward(m, b);
  if (depth == 0) {
    if (root_q) root_q->assign(m.A, r);
    return r;
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < m.A; ++a) {
    double future = 0.0;
    for (std::size_t o = 0; o < m.O; ++o) {
      const double p = obs_prob(m, b, a, o);
      if (p <= 1e-300) continue;
      Vec next = bayes(m, b, a, o);
      if (!classes.empty()) next = product_of_marginals(next, classes, m.n);
      future += p * expectimax_value(m, next, depth - 1, gamma, classes, nullptr);
    }
    const double q = r + gamma * future;
    if (root_q) root_q->push_back(q);
    best = std::max(best, q);
  }
  return best;
}

void l1_walk(const Dense& m, const Classes& classes, const Vec& phi, std::size_t depth, double& worst) {
  if (depth == 0) return;
  for (std::size_t a = 0; a < m.A; ++a) {
    for (std::size_t o = 0; o < m.O; ++o) {
      if (obs_prob(m, phi, a, o) <= 1e-300) continue;
      const Vec pre = bayes(m, phi, a, o);
      const Vec simplified = product_of_marginals(pre, classes, m.n);
      worst = std::max(worst, l1(pre, simplified));
      l1_walk(m, classes, simplified, depth - 1, worst);
    }
  }
}

void drift_walk(const Dense& m, const Classes& classes, std::size_t action, const Vec& exact, const Vec& simplified,
                double weight, std::size_t t, std::size_t horizon, DriftExpectation& out) {
  out.l1[t] += weight * l1(exact, simplified);
  out.kl[t] += weight * kl(exact, simplified);
  if (t == horizon) return;
  for (std::size_t o = 0; o < m.O; ++o) {
    const double p = obs_prob(m, exact, action, o);
    if (p <= 1e-300) continue;
    const Vec next = bayes(m, exact, action, o);
    const Vec next_simplified = product_of_marginals(bayes(m, simplified, action, o), classes, m.n);
    drift_walk(m, classes, action, next, next_simplified, weight * p, t + 1, horizon, out);
  }
}

void kl_walk(const Dense& m, const Classes& classes, const Vec& exact, const Vec& simplified, std::size_t depth,
             double& worst) {
  if (depth == 0) return;
  for (std::size_t a = 0; a < m.A; ++a) {
    for (std::size_t o = 0; o < m.O; ++o) {
      if (obs_prob(m, exact, a, o) <= 1e-300) continue;
      const Vec psi = bayes(m, exact, a, o);
      const Vec phi = bayes(m, simplified, a, o);
      const Vec next = product_of_marginals(phi, classes, m.n);
      worst = std::max(worst, kl(psi, next) - kl(psi, phi));
      kl_walk(m, classes, psi, next, depth - 1, worst);
    }
  }
}

}  // namespace

Expectimax expectimax(const Dense& m, const Vec& b, std::size_t depth, double gamma, const Classes& classes) {
  Expectimax out;
  const Vec root = classes.empty() ? b : product_of_marginals(b, classes, m.n);
  out.value = expectimax_value(m, root, depth, gamma, classes, &out.q);
  return out;
}

double l1_eps_exhaustive(const Dense& m, const Classes& classes, std::size_t depth) {
  Vec delta(m.S, 0.0);
  delta[m.s0] = 1.0;
  const Vec root = product_of_marginals(delta, classes, m.n);
  double worst = l1(delta, root);
  l1_walk(m, classes, root, depth, worst);
  return worst;
}

double kl_eps_exhaustive(const Dense& m, const Classes& classes, std::size_t depth) {
  Vec delta(m.S, 0.0);
  delta[m.s0] = 1.0;
  double worst = -std::numeric_limits<double>::infinity();
  kl_walk(m, classes, delta, product_of_marginals(delta, classes, m.n), depth, worst);
  return worst;
}

DriftExpectation fixed_action_drift(const Dense& m, const Classes& classes, std::size_t action, std::size_t horizon) {
  DriftExpectation out{Vec(horizon + 1, 0.0), Vec(horizon + 1, 0.0)};
  Vec delta(m.S, 0.0);
  delta[m.s0] = 1.0;
  drift_walk(m, classes, action, delta, product_of_marginals(delta, classes, m.n), 1.0, 0, horizon, out);
  return out;
}

double fixed_action_return(const Dense& m, std::size_t action, std::size_t t_sim) {
  Vec dist(m.S, 0.0);
  dist[m.s0] = 1.0;
  double total = 0.0;
  double discount = 1.0;
  for (std::size_t t = 0; t < t_sim; ++t) {
    total += discount * reward(m, dist);
    discount *= m.gamma;
    Vec next(m.S, 0.0);
    for (std::size_t s = 0; s < m.S; ++s) {
      for (std::size_t u = 0; u < m.S; ++u) next[u] += dist[s] * m.T[action][s][u];
    }
    dist = std::move(next);
  }
  return total;
}

fpomdp::PomdpDefinition random_definition(std::mt19937_64& rng, std::size_t n, std::size_t actions,
                                          std::size_t observations, double discount) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  fpomdp::PomdpDefinition def;
  def.num_vars = n;
  for (std::size_t a = 0; a < actions; ++a) def.actions.push_back("a" + std::to_string(a));
  for (std::size_t o = 0; o < observations; ++o) def.observations.push_back("o" + std::to_string(o));
  const std::size_t S = std::size_t{1} << n;
  def.transition.resize(actions);
  for (std::size_t a = 0; a < actions; ++a) {
    for (std::size_t v = 0; v < n; ++v) {
      fpomdp::VariableCpt cpt;
      for (std::size_t p = 0; p < n; ++p) {
        if (p == v || unit(rng) < 0.5) cpt.parents.push_back(p);
      }
      std::shuffle(cpt.parents.begin(), cpt.parents.end(), rng);
      for (std::size_t k = 0; k < (std::size_t{1} << cpt.parents.size()); ++k) cpt.table.push_back(unit(rng));
      def.transition[a].push_back(std::move(cpt));
    }
  }
  for (std::size_t s = 0; s < S; ++s) def.observation_model.push_back(random_distribution(rng, observations));
  for (std::size_t s = 0; s < S; ++s) def.rewards.push_back(unit(rng));
  def.r_max = 1.0;
  def.discount = discount;
  def.initial_state = std::uniform_int_distribution<std::size_t>(0, S - 1)(rng);
  return def;
}

Vec random_distribution(std::mt19937_64& rng, std::size_t size, double zero_fraction) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec p(size);
  double total = 0.0;
  for (double& x : p) {
    x = unit(rng) < zero_fraction ? 0.0 : unit(rng) + 1e-3;
    total += x;
  }
  if (total == 0.0) {
    p[0] = 1.0;
    return p;
  }
  for (double& x : p) x /= total;
  return p;
}

Classes random_partition(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t k = std::uniform_int_distribution<std::size_t>(1, n)(rng);
  Classes classes(k);
  for (std::size_t i = 0; i < n; ++i) classes[i < k ? i : std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)].push_back(order[i]);
  return classes;
}

}  // namespace oracle
