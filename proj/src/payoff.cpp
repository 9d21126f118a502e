#include "normdyn/payoff.hpp"

#include <algorithm>
#include <array>

#include "normdyn/errors.hpp"
#include "normdyn/kernels.hpp"

namespace normdyn::payoff {

PayoffMatrix::PayoffMatrix(Eigen::MatrixXd entries, std::vector<std::string> labels)
    : PayoffMatrix(std::move(entries), labels, std::vector<bool>(labels.size(), false),
                   std::vector<std::optional<norms::Policy>>(labels.size()),
                   std::vector<std::optional<std::size_t>>(labels.size())) {}

PayoffMatrix::PayoffMatrix(Eigen::MatrixXd entries, std::vector<std::string> labels,
                           std::vector<bool> substituted,
                           std::vector<std::optional<norms::Policy>> effective,
                           std::vector<std::optional<std::size_t>> norm_ids)
    : entries_(std::move(entries)),
      labels_(std::move(labels)),
      substituted_(std::move(substituted)),
      effective_(std::move(effective)),
      norm_ids_(std::move(norm_ids)) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (entries_.rows() != n || entries_.cols() != n) {
    throw ShapeError("PayoffMatrix: entries must be square with one row per label");
  }
  if (substituted_.size() != labels_.size() || effective_.size() != labels_.size() ||
      norm_ids_.size() != labels_.size()) {
    throw ShapeError("PayoffMatrix: metadata length differs from strategy count");
  }
  if (!entries_.allFinite()) throw DomainError("PayoffMatrix: non-finite entry");
}

std::size_t PayoffMatrix::substitution_count() const {
  return static_cast<std::size_t>(std::count(substituted_.begin(), substituted_.end(), true));
}

std::optional<std::size_t> PayoffMatrix::index_of_norm(std::size_t norm_id) const {
  for (std::size_t i = 0; i < norm_ids_.size(); ++i) {
    if (norm_ids_[i] == norm_id) return i;
  }
  return std::nullopt;
}

Strategy default_strategy(const norms::NashSolution& nash) {
  return Strategy{"nash", norms::nash_policy(nash), std::nullopt, std::nullopt};
}

std::vector<Strategy> chicken_strategies(const norms::NashSolution& nash) {
  return {default_strategy(nash),
          Strategy{"anti-signal", norms::anti_signal(), std::nullopt, std::nullopt},
          Strategy{"signal-following", norms::signal_following(), std::nullopt, std::nullopt},
          Strategy{"always-go", norms::always_go(), std::nullopt, std::nullopt}};
}

std::vector<Strategy> norm_strategies(const std::vector<norms::Norm>& norms,
                                      const norms::NashSolution& nash) {
  std::vector<Strategy> out{default_strategy(nash)};
  for (const norms::Norm& n : norms) {
    out.push_back(Strategy{"n" + std::to_string(n.id), n.prescription, n.description, n.id});
  }
  return out;
}

PayoffMatrix build_gamma(const std::vector<Strategy>& strategies, const prob::JointDist2& obs,
                         const games::RewardMatrix& r, const norms::NashSolution& nash) {
  if (strategies.empty()) throw ShapeError("build_gamma: no strategies");
  if (!strategies.front().prescription.observation_independent()) {
    throw DomainError("build_gamma: strategy 0 must be the observation-independent default");
  }
  const norms::Policy fallback = norms::nash_policy(nash, obs.size());
  const std::size_t n = strategies.size();
  std::vector<std::string> labels;
  std::vector<bool> substituted;
  std::vector<std::optional<norms::Policy>> effective;
  std::vector<std::optional<std::size_t>> ids;
  for (const Strategy& s : strategies) {
    bool null_norm = false;
    if (s.description) {
      null_norm = !norms::is_rational(norms::Norm{s.prescription, *s.description, 0}, obs, r);
    }
    labels.push_back(s.label);
    substituted.push_back(null_norm);
    effective.emplace_back(null_norm ? fallback : s.prescription);
    ids.push_back(s.norm_id);
  }
  Eigen::MatrixXd g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          norms::avg_reward(*effective[i], *effective[j], obs, r);
    }
  }
  return PayoffMatrix(std::move(g), std::move(labels), std::move(substituted),
                      std::move(effective), std::move(ids));
}

PayoffMatrix chicken_gamma_closed_form(double b, double L) {
  if (!(L > 0.0)) throw DomainError("chicken_gamma_closed_form: requires L > 0");
  const std::array<double, 1> bs{b};
  const std::array<double, 1> ls{L};
  std::array<double, 16> e{};
  kernels::chicken_gamma_batch(bs, ls, e, kernels::Isa::Scalar);
  Eigen::MatrixXd g(4, 4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) g(i, j) = e[static_cast<std::size_t>(4 * i + j)];
  }
  const norms::NashSolution nash = norms::mixed_nash_chicken(3.0, L);
  std::vector<std::string> labels;
  std::vector<std::optional<norms::Policy>> effective;
  for (const Strategy& s : chicken_strategies(nash)) {
    labels.push_back(s.label);
    effective.emplace_back(s.prescription);
  }
  return PayoffMatrix(std::move(g), std::move(labels), std::vector<bool>(4, false),
                      std::move(effective), std::vector<std::optional<std::size_t>>(4));
}

}  // namespace normdyn::payoff
