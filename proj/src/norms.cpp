#include "normdyn/norms.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "normdyn/errors.hpp"
#include "normdyn/payoff.hpp"

namespace normdyn::norms {

namespace {

bool tied(double x, double y) {
  return std::abs(x - y) <= kTieTol * std::max({1.0, std::abs(x), std::abs(y)});
}

void check_binary_game(const Policy& pi, const JointDist2& obs, const char* what) {
  if (pi.n_actions() != 2) throw ShapeError(std::string(what) + ": reward matrix is 2x2");
  if (pi.n_obs() != obs.size()) {
    throw ShapeError(std::string(what) + ": policy observation count differs from joint");
  }
}

}  // namespace

Policy::Policy(Eigen::MatrixXd entries) : m_(std::move(entries)) {
  prob::CondDist validated(m_);  // throws on a non-stochastic matrix
  deterministic_ = validated.deterministic();
}

Policy Policy::from_actions(std::span<const int> action_per_obs, std::size_t n_actions) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_actions),
                                            static_cast<Eigen::Index>(action_per_obs.size()));
  for (std::size_t o = 0; o < action_per_obs.size(); ++o) {
    const int a = action_per_obs[o];
    if (a < 0 || static_cast<std::size_t>(a) >= n_actions) {
      throw DomainError("Policy::from_actions: action index out of range");
    }
    m(a, static_cast<Eigen::Index>(o)) = 1.0;
  }
  return Policy(std::move(m));
}

Policy Policy::constant(const Eigen::VectorXd& action_dist, std::size_t n_obs) {
  return Policy(action_dist.replicate(1, static_cast<Eigen::Index>(n_obs)));
}

bool Policy::observation_independent() const {
  for (Eigen::Index j = 1; j < m_.cols(); ++j) {
    if (m_.col(j) != m_.col(0)) return false;
  }
  return true;
}

int Policy::action(std::size_t obs) const {
  if (!deterministic_) throw DomainError("Policy::action: policy is stochastic");
  Eigen::Index row = 0;
  m_.col(static_cast<Eigen::Index>(obs)).maxCoeff(&row);
  return static_cast<int>(row);
}

std::string Policy::bits() const {
  if (!deterministic_) return "mixed";
  std::string s;
  for (std::size_t o = 0; o < n_obs(); ++o) s += std::to_string(action(o));
  return s;
}

Policy always_stop() { return Policy::from_actions(std::vector{0, 0}, 2); }
Policy signal_following() { return Policy::from_actions(std::vector{0, 1}, 2); }
Policy anti_signal() { return Policy::from_actions(std::vector{1, 0}, 2); }
Policy always_go() { return Policy::from_actions(std::vector{1, 1}, 2); }

std::vector<Policy> enumerate_policies(std::size_t n_actions, std::size_t n_obs) {
  if (n_actions == 0 || n_obs == 0) throw DomainError("enumerate_policies: counts must be >= 1");
  std::size_t count = 1;
  for (std::size_t i = 0; i < n_obs; ++i) count *= n_actions;
  std::vector<Policy> out;
  out.reserve(count);
  std::vector<int> actions(n_obs, 0);
  for (std::size_t k = 0; k < count; ++k) {
    // Mixed-radix digits of k, most significant digit = observation 0.
    std::size_t rem = k;
    for (std::size_t o = n_obs; o-- > 0;) {
      actions[o] = static_cast<int>(rem % n_actions);
      rem /= n_actions;
    }
    out.push_back(Policy::from_actions(actions, n_actions));
  }
  return out;
}

std::vector<Norm> enumerate_norms(std::size_t n_actions, std::size_t n_obs) {
  const std::vector<Policy> policies = enumerate_policies(n_actions, n_obs);
  std::vector<Norm> out;
  out.reserve(policies.size() * policies.size());
  for (const Policy& p : policies) {
    for (const Policy& d : policies) out.push_back(Norm{p, d, out.size()});
  }
  return out;
}

Eigen::MatrixXd joint_action(const Policy& pi, const JointDist2& obs, const Policy& pi_opp) {
  if (pi.n_obs() != obs.size() || pi_opp.n_obs() != obs.size()) {
    throw ShapeError("joint_action: policy observation count differs from joint");
  }
  return pi.entries() * obs.entries() * pi_opp.entries().transpose();
}

double avg_reward(const Policy& pi, const Policy& pi_opp, const JointDist2& obs,
                  const RewardMatrix& r) {
  check_binary_game(pi, obs, "avg_reward");
  check_binary_game(pi_opp, obs, "avg_reward");
  const Eigen::MatrixXd paa = joint_action(pi, obs, pi_opp);
  return (r.entries().array() * paa.array()).sum();
}

std::vector<ObsBestResponse> best_response_per_obs(const Policy& opp, const JointDist2& obs,
                                                   const RewardMatrix& r) {
  check_binary_game(opp, obs, "best_response_per_obs");
  // Row o of (J π'ᵀ) is p(o, a'); dividing by p(o) gives the opponent's
  // action distribution conditioned on our observation.
  const Eigen::MatrixXd obs_opp_action = obs.entries() * opp.entries().transpose();
  std::vector<ObsBestResponse> out(obs.size());
  for (std::size_t o = 0; o < obs.size(); ++o) {
    ObsBestResponse& br = out[o];
    const auto row = obs_opp_action.row(static_cast<Eigen::Index>(o));
    const double p_obs = row.sum();
    if (p_obs <= 0.0) {
      br.unobserved = true;
      br.actions = {0, 1};
      br.values = {0.0, 0.0};
      continue;
    }
    const Eigen::Vector2d opp_action = row.transpose() / p_obs;
    const Eigen::Vector2d values = r.entries() * opp_action;
    br.values = {values(0), values(1)};
    const double best = values.maxCoeff();
    for (int a = 0; a < 2; ++a) {
      if (values(a) == best || tied(values(a), best)) br.actions.push_back(a);
    }
  }
  return out;
}

bool is_best_response(const Policy& pi, const Policy& opp, const JointDist2& obs,
                      const RewardMatrix& r) {
  check_binary_game(pi, obs, "is_best_response");
  const auto br = best_response_per_obs(opp, obs, r);
  for (std::size_t o = 0; o < br.size(); ++o) {
    for (int a = 0; a < 2; ++a) {
      if (pi.entries()(a, static_cast<Eigen::Index>(o)) <= 0.0) continue;
      if (std::find(br[o].actions.begin(), br[o].actions.end(), a) == br[o].actions.end()) {
        return false;
      }
    }
  }
  return true;
}

bool is_rational(const Norm& n, const JointDist2& obs, const RewardMatrix& r) {
  return is_best_response(n.prescription, n.description, obs, r);
}

std::vector<NormClass> classify_all(const std::vector<Norm>& norms, const JointDist2& obs,
                                    const RewardMatrix& r, const payoff::PayoffMatrix& gamma) {
  std::vector<NormClass> out(norms.size());
  for (std::size_t k = 0; k < norms.size(); ++k) {
    out[k].rational = is_rational(norms[k], obs, r);
    out[k].null = !out[k].rational;
    out[k].consistent =
        out[k].rational && is_best_response(norms[k].prescription, norms[k].prescription, obs, r);
  }
  for (std::size_t k = 0; k < norms.size(); ++k) {
    if (!out[k].rational) continue;
    for (std::size_t m = 0; m < norms.size(); ++m) {
      if (out[m].rational &&
          is_best_response(norms[k].prescription, norms[m].prescription, obs, r)) {
        out[k].empirically_validatable = true;
        break;
      }
    }
    out[k].inconsistent = out[k].empirically_validatable && !out[k].consistent;
  }

  const Eigen::MatrixXd& g = gamma.entries();
  for (std::size_t k = 0; k < norms.size(); ++k) {
    if (!out[k].consistent) continue;
    const std::optional<std::size_t> idx = gamma.index_of_norm(norms[k].id);
    if (!idx) throw ShapeError("classify_all: payoff matrix has no strategy for norm " +
                               std::to_string(norms[k].id));
    const auto n = static_cast<Eigen::Index>(*idx);
    bool stable = true;
    for (Eigen::Index m = 0; m < g.rows() && stable; ++m) {
      // Strategies that behave identically are not distinct mutants.
      if (gamma.effective_policy(static_cast<std::size_t>(m)) ==
          gamma.effective_policy(static_cast<std::size_t>(n))) {
        continue;
      }
      if (tied(g(n, n), g(m, n))) {
        stable = g(n, m) > g(m, m) && !tied(g(n, m), g(m, m));
      } else {
        stable = g(n, n) > g(m, n);
      }
    }
    out[k].evolutionarily_stable = stable;
  }

  for (std::size_t k = 0; k < norms.size(); ++k) {
    if (!out[k].evolutionarily_stable) continue;
    bool br_all = true;
    for (std::size_t m = 0; m < norms.size() && br_all; ++m) {
      if (out[m].consistent) {
        br_all = is_best_response(norms[k].prescription, norms[m].prescription, obs, r);
      }
    }
    out[k].best_response = br_all;
  }
  return out;
}

bool is_correlated_equilibrium(const Policy& pi, const Policy& pi_opp, const JointDist2& obs,
                               const RewardMatrix& r) {
  if (!pi.deterministic() || !pi_opp.deterministic()) {
    throw DomainError("is_correlated_equilibrium: policies must be deterministic");
  }
  return is_best_response(pi, pi_opp, obs, r) &&
         is_best_response(pi_opp, pi, obs.transposed(), r);
}

bool is_nash_factorizable(const Policy& pi, const Policy& pi_opp, const JointDist2& obs,
                          double tol) {
  return prob::is_independent(JointDist2(joint_action(pi, obs, pi_opp)), tol);
}

NashSolution mixed_nash_chicken(double B, double L) {
  if (!(L > 0.0)) throw DomainError("mixed_nash_chicken: requires L > 0");
  return {1.0 / (1.0 + L), (B + L) / (1.0 + L)};
}

Policy nash_policy(const NashSolution& nash, std::size_t n_obs) {
  return Policy::constant(Eigen::Vector2d(nash.p_stop, 1.0 - nash.p_stop), n_obs);
}

std::string_view to_string(Bound b) {
  switch (b) {
    case Bound::Satisfied: return "ok";
    case Bound::Marginal: return "marginal";
    case Bound::Violated: return "violated";
  }
  return "unknown";
}

namespace {

// `slack` > 0 means the constraint holds strictly.
Bound classify_slack(double slack) {
  if (std::abs(slack) <= kBoundaryTol) return Bound::Marginal;
  return slack > 0.0 ? Bound::Satisfied : Bound::Violated;
}

}  // namespace

RationalityRegion rationality_region(double b, double g, double L) {
  if (!(L > 0.0)) throw DomainError("rationality_region: requires L > 0");
  RationalityRegion out;
  // With g = 0 a green observation implies the opponent saw red, so go is
  // always the best response (and green is unobserved at b = 1).
  out.green = g == 0.0 ? Bound::Satisfied : classify_slack((1.0 - 2.0 * g / L) - b);
  out.red = classify_slack((1.0 + 2.0 * g * L) / (1.0 + 2.0 * L) - b);
  out.positivity = classify_slack(b - g);
  return out;
}

}  // namespace normdyn::norms
