#pragma once

// The norm payoff matrix Γ: Γ(n, n') is the average reward of strategy n
// played against strategy n'.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "normdyn/games.hpp"
#include "normdyn/norms.hpp"
#include "normdyn/probkit.hpp"

namespace normdyn::payoff {

struct Strategy {
  std::string label;
  norms::Policy prescription;
  // When present the strategy is a norm; a null norm plays the default.
  std::optional<norms::Policy> description;
  std::optional<std::size_t> norm_id;
};

class PayoffMatrix {
 public:
  // Γ without provenance (closed forms, hand-built test matrices).
  PayoffMatrix(Eigen::MatrixXd entries, std::vector<std::string> labels);
  PayoffMatrix(Eigen::MatrixXd entries, std::vector<std::string> labels,
               std::vector<bool> substituted, std::vector<std::optional<norms::Policy>> effective,
               std::vector<std::optional<std::size_t>> norm_ids);

  const Eigen::MatrixXd& entries() const { return entries_; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  double operator()(std::size_t n, std::size_t m) const {
    return entries_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  }
  // True when strategy n is a null norm replaced by the default.
  bool substituted(std::size_t n) const { return substituted_[n]; }
  std::size_t substitution_count() const;
  // Policy actually played by strategy n, when known.
  const std::optional<norms::Policy>& effective_policy(std::size_t n) const { return effective_[n]; }
  std::optional<std::size_t> index_of_norm(std::size_t norm_id) const;

 private:
  Eigen::MatrixXd entries_;
  std::vector<std::string> labels_;
  std::vector<bool> substituted_;
  std::vector<std::optional<norms::Policy>> effective_;
  std::vector<std::optional<std::size_t>> norm_ids_;
};

Strategy default_strategy(const norms::NashSolution& nash);

// {default, anti-signal, signal-following, always-go}: the prescription basis
// of the chicken Γ, without descriptions.
std::vector<Strategy> chicken_strategies(const norms::NashSolution& nash);

// Default followed by one strategy per norm (label "n<id>").
std::vector<Strategy> norm_strategies(const std::vector<norms::Norm>& norms,
                                      const norms::NashSolution& nash);

// Γ(n, n') = avg_reward(effective_n, effective_n', J, R). strategies[0] must
// be observation independent (the default). Null norms are replaced by the
// default Nash policy and recorded as substituted.
PayoffMatrix build_gamma(const std::vector<Strategy>& strategies, const prob::JointDist2& obs,
                         const games::RewardMatrix& r, const norms::NashSolution& nash);

// Closed form of the chicken Γ at B = 3, g = 0, in chicken_strategies order.
PayoffMatrix chicken_gamma_closed_form(double b, double L);

}  // namespace normdyn::payoff
