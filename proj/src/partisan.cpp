#include "normdyn/partisan.hpp"

#include <algorithm>
#include <cmath>

#include "normdyn/abm.hpp"
#include "normdyn/errors.hpp"
#include "normdyn/rng.hpp"

namespace normdyn::partisan {

OpinionVector::OpinionVector(Eigen::VectorXd d) : d_(std::move(d)) {
  if (d_.size() == 0) throw DomainError("OpinionVector: dimension must be at least 1");
  if (!d_.allFinite()) throw DomainError("OpinionVector: components must be finite");
}

double similarity(const OpinionVector& d, const OpinionVector& d_opp) {
  if (d.dim() != d_opp.dim()) throw ShapeError("similarity: dimension mismatch");
  double s = 0.0;
  for (Eigen::Index k = 0; k < d.d().size(); ++k) s += step(d.d()(k)) * step(d_opp.d()(k));
  return s / static_cast<double>(d.dim());
}

PairType infer_type(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("infer_type: similarity must lie in [0, 1]");
  return {static_cast<int>(step(s - 0.5)), false};
}

games::RewardMatrix partisan_reward(const PairType& type, double B, double L) {
  if (type.xi != 0 && type.xi != 1) throw DomainError("partisan_reward: xi must be 0 or 1");
  games::chicken_reward(B, L);
  return games::RewardMatrix(B, 2.0 * type.xi - 1.0, B + L, 0.0);
}

std::optional<PairType> infer_type_partial(double observed_component, double own_component,
                                           Prior prior) {
  if (prior == Prior::Uninformative) return std::nullopt;
  if (step(observed_component) != step(own_component)) return PairType{0, true};
  return std::nullopt;
}

norms::NashSolution symmetric_nash(const games::RewardMatrix& r) {
  const double stop_vs_stop = r(0, 0), stop_vs_go = r(0, 1);
  const double go_vs_stop = r(1, 0), go_vs_go = r(1, 1);
  if (stop_vs_stop > go_vs_stop && stop_vs_go > go_vs_go) return {1.0, stop_vs_stop};
  if (go_vs_stop > stop_vs_stop && go_vs_go > stop_vs_go) return {0.0, go_vs_go};
  const double den = stop_vs_stop - stop_vs_go - go_vs_stop + go_vs_go;
  if (den == 0.0) throw DomainError("symmetric_nash: degenerate game");
  const double p = (go_vs_go - stop_vs_go) / den;
  if (!(p >= 0.0 && p <= 1.0)) {
    // Weak dominance with a tie: take the payoff-dominant pure equilibrium.
    return stop_vs_stop >= go_vs_go ? norms::NashSolution{1.0, stop_vs_stop}
                                    : norms::NashSolution{0.0, go_vs_go};
  }
  const double rho = p * p * stop_vs_stop + p * (1 - p) * (stop_vs_go + go_vs_stop) + (1 - p) * (1 - p) * go_vs_go;
  return {p, rho};
}

void DemoConfig::validate() const {
  if (N == 0) throw DomainError("N must be positive");
  if (D == 0) throw DomainError("D must be at least 1");
  if (!std::isfinite(mu)) throw DomainError("mu must be finite");
  games::chicken_reward(B, L);
  prob::signal_dist(j0);
}

namespace {

constexpr std::uint64_t kOpinions = 1;
constexpr std::uint64_t kPairing = 2;
constexpr std::uint64_t kPlay = 3;

int draw_action(const norms::Policy& pi, int obs, Rng& rng) {
  return rng.uniform() < pi.entries()(0, obs) ? 0 : 1;
}

}  // namespace

std::vector<DemoRound> run_demo(const DemoConfig& c) {
  c.validate();
  const std::size_t total = 2 * c.N;
  std::vector<OpinionVector> opinions;
  opinions.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    Rng rng(derive_seed(c.seed, {kOpinions, i}));
    const double mean = i < c.N ? c.mu : -c.mu;
    Eigen::VectorXd d(static_cast<Eigen::Index>(c.D));
    for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = mean + rng.normal();
    opinions.emplace_back(std::move(d));
  }
  const auto group = [&](std::size_t i) { return i < c.N ? 0 : 1; };

  const games::RewardMatrix rewards[2] = {partisan_reward({0, false}, c.B, c.L),
                                          partisan_reward({1, false}, c.B, c.L)};
  const abm::AgentType follower = abm::AgentType::norm("01", norms::signal_following());
  std::optional<prob::JointDist2> est[2] = {prob::signal_dist(c.j0), prob::signal_dist(c.j0)};

  std::vector<DemoRound> out;
  for (std::size_t t = 0; t < c.rounds; ++t) {
    abm::PlayPair play[2] = {
        abm::conditional_play(follower, follower, est[0], rewards[0], symmetric_nash(rewards[0])),
        abm::conditional_play(follower, follower, est[1], rewards[1], symmetric_nash(rewards[1]))};
    const abm::Pairing pairs = abm::pair_agents(total, derive_seed(c.seed, {kPairing, t}));
    Eigen::MatrixXd counts[2] = {Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2)};
    double stops[2] = {0, 0}, actions[2] = {0, 0}, opposed[2] = {0, 0}, pair_count[2] = {0, 0};
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, j] = pairs[p];
      Rng rng(derive_seed(c.seed, {kPlay, t, p}));
      const std::size_t ki = rng.below(c.D);
      const std::size_t kj = rng.below(c.D);
      const auto xi_i = infer_type_partial(opinions[j].d()(static_cast<Eigen::Index>(ki)),
                                           opinions[i].d()(static_cast<Eigen::Index>(ki)), c.prior);
      const auto xi_j = infer_type_partial(opinions[i].d()(static_cast<Eigen::Index>(kj)),
                                           opinions[j].d()(static_cast<Eigen::Index>(kj)), c.prior);
      const int xi = std::min(xi_i ? xi_i->xi : 1, xi_j ? xi_j->xi : 1);
      const auto& J = est[xi]->entries();
      const double w[4] = {J(0, 0), J(0, 1), J(1, 0), J(1, 1)};
      const std::size_t cell = rng.categorical(w);
      const int a = draw_action(play[xi].own, static_cast<int>(cell / 2), rng);
      const int ap = draw_action(play[xi].opp, static_cast<int>(cell % 2), rng);
      counts[xi](a, ap) += 1.0;
      counts[xi](ap, a) += 1.0;
      const int cross = group(i) != group(j) ? 1 : 0;
      stops[cross] += (a == 0) + (ap == 0);
      actions[cross] += 2.0;
      opposed[cross] += xi == 0;
      pair_count[cross] += 1.0;
    }
    for (int x = 0; x < 2; ++x) {
      const double n = counts[x].sum();
      if (n > 0.0) est[x] = prob::JointDist2(counts[x] / n);
    }
    const auto share = [](double num, double den) { return den > 0.0 ? num / den : std::nan(""); };
    out.push_back({share(stops[0], actions[0]), share(stops[1], actions[1]), share(opposed[0], pair_count[0]),
                   share(opposed[1], pair_count[1]), *est[1], *est[0]});
  }
  return out;
}

io::CsvTable to_table(const std::vector<DemoRound>& rounds) {
  using io::format_double;
  io::CsvTable t;
  t.header = {"round", "in_group_stop", "cross_group_stop", "in_group_opposed", "cross_group_opposed"};
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    const auto& r = rounds[k];
    t.add_row({std::to_string(k), format_double(r.in_group_stop), format_double(r.cross_group_stop),
               format_double(r.in_group_opposed), format_double(r.cross_group_opposed)});
  }
  return t;
}

}  // namespace normdyn::partisan
