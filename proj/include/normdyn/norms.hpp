#pragma once

// Policies, norms, best responses and the norm classification hierarchy.
//
// Binary conventions used throughout: action 0 = stop, 1 = go; observation
// 0 = red, 1 = green. A joint observation distribution J has the player's
// observation on rows and the opponent's on columns.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "normdyn/games.hpp"
#include "normdyn/probkit.hpp"

namespace normdyn::payoff {
class PayoffMatrix;
}

namespace normdyn::norms {

using games::RewardMatrix;
using prob::JointDist2;

// |A| x |O| column-stochastic matrix; column o is the action distribution
// played on observation o.
class Policy {
 public:
  explicit Policy(Eigen::MatrixXd entries);

  // One action per observation.
  static Policy from_actions(std::span<const int> action_per_obs, std::size_t n_actions);
  // Same action distribution for every observation.
  static Policy constant(const Eigen::VectorXd& action_dist, std::size_t n_obs);

  const Eigen::MatrixXd& entries() const { return m_; }
  std::size_t n_actions() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t n_obs() const { return static_cast<std::size_t>(m_.cols()); }
  bool deterministic() const { return deterministic_; }
  bool observation_independent() const;
  // Action taken on `obs`. Throws DomainError for a stochastic policy.
  int action(std::size_t obs) const;
  // Action column vector, e.g. "01" for the binary signal-following policy.
  std::string bits() const;

  friend bool operator==(const Policy& x, const Policy& y) { return x.m_ == y.m_; }

 private:
  Eigen::MatrixXd m_;
  bool deterministic_ = false;
};

// The four deterministic binary policies, in enumeration order.
Policy always_stop();
Policy signal_following();
Policy anti_signal();
Policy always_go();

struct Norm {
  Policy prescription;
  Policy description;
  std::size_t id = 0;
};

struct NormClass {
  bool rational = false;
  bool null = false;
  bool empirically_validatable = false;
  bool consistent = false;
  bool inconsistent = false;
  bool evolutionarily_stable = false;
  bool best_response = false;
};

// Mixed Nash equilibrium of the chicken family.
struct NashSolution {
  double p_stop = 0.0;
  double rho = 0.0;
};

// All deterministic policies, ordered lexicographically by action column
// (observation 0 most significant).
std::vector<Policy> enumerate_policies(std::size_t n_actions, std::size_t n_obs);

// All ordered (prescription, description) pairs, prescription-major.
// Norm id = prescription_index * n_policies + description_index.
std::vector<Norm> enumerate_norms(std::size_t n_actions, std::size_t n_obs);

// Joint action distribution P_aa' = π J π'ᵀ (own action on rows).
Eigen::MatrixXd joint_action(const Policy& pi, const JointDist2& obs, const Policy& pi_opp);

// Expected reward Σ R(a,a') π(a|o) J(o,o') π'(a'|o').
double avg_reward(const Policy& pi, const Policy& pi_opp, const JointDist2& obs,
                  const RewardMatrix& r);

// Relative tolerance under which two action values count as tied.
inline constexpr double kTieTol = 1e-12;

struct ObsBestResponse {
  std::vector<int> actions;    // argmax set, ascending
  std::vector<double> values;  // expected reward per action
  bool unobserved = false;     // zero-probability observation: every action returned
};

// For each observation o, the argmax over a of E[R(a,a') | o] against `opp`.
std::vector<ObsBestResponse> best_response_per_obs(const Policy& opp, const JointDist2& obs,
                                                   const RewardMatrix& r);

// True when, on every observation, the support of `pi` lies inside the
// best-response set against `opp`.
bool is_best_response(const Policy& pi, const Policy& opp, const JointDist2& obs,
                      const RewardMatrix& r);

// Prescription is a per-observation best response to the description.
bool is_rational(const Norm& n, const JointDist2& obs, const RewardMatrix& r);

// Flags for every norm. `gamma` must contain one strategy per norm, tagged
// with the norm id (see payoff::norm_strategies); evolutionary stability is
// evaluated on it.
std::vector<NormClass> classify_all(const std::vector<Norm>& norms, const JointDist2& obs,
                                    const RewardMatrix& r, const payoff::PayoffMatrix& gamma);

// Both policies are best responses to each other; the opponent observes the
// column variable of `obs`.
bool is_correlated_equilibrium(const Policy& pi, const Policy& pi_opp, const JointDist2& obs,
                               const RewardMatrix& r);

bool is_nash_factorizable(const Policy& pi, const Policy& pi_opp, const JointDist2& obs,
                          double tol);

// p_stop = 1/(1+L), rho = (B+L)/(1+L). Throws DomainError for L <= 0.
NashSolution mixed_nash_chicken(double B, double L);

// Observation-independent policy playing the mixed Nash action distribution.
Policy nash_policy(const NashSolution& nash, std::size_t n_obs = 2);

enum class Bound { Satisfied, Marginal, Violated };

std::string_view to_string(Bound b);

// Closed-form rationality constraints of the signal-following norm.
struct RationalityRegion {
  Bound green = Bound::Satisfied;       // b < 1 - 2g/L
  Bound red = Bound::Satisfied;         // b < (1 + 2gL)/(1 + 2L)
  Bound positivity = Bound::Satisfied;  // b > g

  bool green_ok() const { return green == Bound::Satisfied; }
  bool red_ok() const { return red == Bound::Satisfied; }
  bool positivity_ok() const { return positivity == Bound::Satisfied; }
  bool any_marginal() const {
    return green == Bound::Marginal || red == Bound::Marginal || positivity == Bound::Marginal;
  }
};

// Distance below which a constraint is reported Marginal.
inline constexpr double kBoundaryTol = 1e-9;

RationalityRegion rationality_region(double b, double g, double L);

}  // namespace normdyn::norms
