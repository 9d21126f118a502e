#pragma once

// Closed-loop finite-population simulation. Each round agents are paired,
// observe a signal drawn from the previous round's empirical action
// distribution for their type pair, play their prescription when it is a
// best response (otherwise the mixed Nash policy), and then imitate one
// another with a logistic adoption rule.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "normdyn/csv.hpp"
#include "normdyn/games.hpp"
#include "normdyn/norms.hpp"
#include "normdyn/probkit.hpp"

namespace normdyn::abm {

// A strategy agents can hold: a prescription, or the default mixed Nash play.
struct AgentType {
  std::string label;
  norms::Policy prescription;
  bool is_default = false;

  static AgentType norm(std::string label, norms::Policy prescription);
  static AgentType default_type(const norms::NashSolution& nash);
};

// Parses "default" or a binary action string such as "01".
AgentType parse_type(const std::string& token, const norms::NashSolution& nash);

struct Population {
  std::vector<std::size_t> type_of;  // per agent
  std::size_t n_types = 0;

  std::size_t size() const { return type_of.size(); }
  Eigen::VectorXd frequencies() const;
};

// Deterministic allocation of N agents by largest remainder. N must be even.
Population make_population(std::size_t N, const Eigen::VectorXd& mix);

using Pairing = std::vector<std::pair<std::size_t, std::size_t>>;

// Uniform random perfect matching of N agents (N even).
Pairing pair_agents(std::size_t N, std::uint64_t seed);

// Empirical joint action distribution of (row agent, column agent) action
// pairs; nullopt for an empty set.
std::optional<prob::JointDist2> empirical_joint(std::span<const std::pair<int, int>> actions);

// Per ordered type pair (n, n'), the current estimate of the joint action
// distribution with the n agent on rows. Entry (n', n) is always the
// transpose of (n, n').
class Estimates {
 public:
  Estimates(std::size_t n_types, const prob::JointDist2& initial);

  std::size_t n_types() const { return n_; }
  const prob::JointDist2& get(std::size_t n, std::size_t m) const { return est_[n * n_ + m]; }
  void set(std::size_t n, std::size_t m, const prob::JointDist2& j);

 private:
  std::size_t n_;
  std::vector<prob::JointDist2> est_;
};

struct PlayPair {
  norms::Policy own;
  norms::Policy opp;
  bool own_rational = false;
  bool opp_rational = false;
  bool fallback = false;  // no estimate: both sides play Nash
};

// Each side plays its prescription when that prescription is a best response
// to the other side's prescription under `obs`; otherwise the Nash policy.
PlayPair conditional_play(const AgentType& n, const AgentType& n_opp,
                          const std::optional<prob::JointDist2>& obs, const games::RewardMatrix& r,
                          const norms::NashSolution& nash);

struct StepResult {
  Pairing pairs;
  std::vector<int> actions;     // per agent
  std::vector<double> payoffs;  // per agent
  Estimates estimates;
  Eigen::MatrixXd gamma;        // Γ_nn'(t) from realized play; carried when unobserved
  std::vector<bool> observed;   // per ordered type pair, row-major
  std::size_t fallbacks = 0;    // pairs where a side played Nash by rationality failure
};

StepResult step(const std::vector<AgentType>& types, const Population& pop, const Estimates& est,
                const Eigen::MatrixXd& prev_gamma, const games::RewardMatrix& r,
                const norms::NashSolution& nash, std::uint64_t seed, std::size_t round);

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

// 1/(1 + exp(-β Δf)). With β = ∞ the rule is deterministic: 1 when Δf > 0,
// 0 otherwise.
double adoption_probability(double delta_f, double beta);

// Agents meet in a fresh random matching; in each pair one agent, chosen by a
// fair coin, adopts the other's type with adoption_probability(f_other -
// f_self, β).
Population imitation_update(const Population& pop, std::span<const double> payoffs, double beta,
                            std::uint64_t seed, std::size_t round);

struct Config {
  std::size_t N = 1000;
  std::size_t rounds = 500;
  double beta = 1.0;
  std::vector<std::string> types{"default", "10", "01", "11"};
  Eigen::VectorXd initial_mix;  // per type; empty = uniform
  prob::SignalParams j0{0.4, 0.0};
  double B = 3.0;
  double L = 0.5;
  std::uint64_t seed = 1;
  bool imitation = true;

  // Throws DomainError on invalid settings.
  void validate() const;
};

struct Round {
  Eigen::VectorXd frequencies;
  Eigen::MatrixXd gamma;
  std::vector<prob::JointDist2> estimates;  // row-major over ordered type pairs
  std::size_t fallbacks = 0;
};

struct Run {
  std::vector<AgentType> types;
  std::vector<Round> rounds;  // rounds[0] is the initial state
};

Run run(const Config& config);

// Deterministic companion of run(): estimates follow their expected update
// J ← π J π'ᵀ, Γ(t) is the expected payoff under them, and frequencies follow
// the replicator flow for time β/4 per round (the small-β drift of the
// imitation rule).
struct MeanField {
  std::vector<Eigen::VectorXd> frequencies;  // rounds + 1 entries
  std::vector<Eigen::MatrixXd> gamma;        // per round
};
MeanField mean_field(const Config& config);

// Replicator path driven by a run's own Γ(t) trace: starting from the run's
// initial frequencies, round t integrates for time β/4 under rounds[t].gamma.
std::vector<Eigen::VectorXd> matched_replicator(const Run& run, double beta);

io::CsvTable to_table(const Run& run);

}  // namespace normdyn::abm
