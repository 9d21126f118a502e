#include "normdyn/abm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "normdyn/errors.hpp"
#include "normdyn/parallel.hpp"
#include "normdyn/replicator.hpp"
#include "normdyn/rng.hpp"

namespace normdyn::abm {

namespace {

// Stream keys for derive_seed.
constexpr std::uint64_t kGamePairing = 1;
constexpr std::uint64_t kGamePlay = 2;
constexpr std::uint64_t kImitationPairing = 3;
constexpr std::uint64_t kImitationCoin = 4;

Eigen::MatrixXd outer_counts(std::span<const std::pair<int, int>> actions) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
  for (const auto& [a, ap] : actions) c(a, ap) += 1.0;
  return c;
}

int sample_action(const norms::Policy& pi, int obs, Rng& rng) {
  const Eigen::VectorXd col = pi.entries().col(obs);
  if (pi.deterministic()) return col(1) > 0.5 ? 1 : 0;
  return rng.uniform() < col(0) ? 0 : 1;
}

}  // namespace

AgentType AgentType::norm(std::string label, norms::Policy prescription) {
  return {std::move(label), std::move(prescription), false};
}

AgentType AgentType::default_type(const norms::NashSolution& nash) {
  return {"default", norms::nash_policy(nash), true};
}

AgentType parse_type(const std::string& token, const norms::NashSolution& nash) {
  if (token == "default") return AgentType::default_type(nash);
  if (token.size() != 2 || token.find_first_not_of("01") != std::string::npos) {
    throw DomainError("agent type must be 'default' or two action bits, got '" + token + "'");
  }
  const int acts[2] = {token[0] - '0', token[1] - '0'};
  return AgentType::norm(token, norms::Policy::from_actions(acts, 2));
}

Eigen::VectorXd Population::frequencies() const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_types));
  for (std::size_t t : type_of) f(static_cast<Eigen::Index>(t)) += 1.0;
  if (!type_of.empty()) f /= static_cast<double>(type_of.size());
  return f;
}

Population make_population(std::size_t N, const Eigen::VectorXd& mix) {
  if (N == 0 || N % 2 != 0) throw DomainError("population size must be even and positive");
  const prob::Marginal m(mix);
  const std::size_t k = static_cast<std::size_t>(mix.size());
  std::vector<std::size_t> counts(k);
  std::vector<std::pair<double, std::size_t>> rem(k);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double exact = mix(static_cast<Eigen::Index>(i)) * static_cast<double>(N);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    rem[i] = {exact - static_cast<double>(counts[i]), i};
    assigned += counts[i];
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t i = 0; assigned < N; ++i, ++assigned) ++counts[rem[i % k].second];
  Population pop;
  pop.n_types = k;
  pop.type_of.reserve(N);
  for (std::size_t i = 0; i < k; ++i) pop.type_of.insert(pop.type_of.end(), counts[i], i);
  return pop;
}

Pairing pair_agents(std::size_t N, std::uint64_t seed) {
  if (N % 2 != 0) throw DomainError("pair_agents: N must be even");
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  Pairing pairs(N / 2);
  for (std::size_t p = 0; p < N / 2; ++p) pairs[p] = {order[2 * p], order[2 * p + 1]};
  return pairs;
}

std::optional<prob::JointDist2> empirical_joint(std::span<const std::pair<int, int>> actions) {
  if (actions.empty()) return std::nullopt;
  for (const auto& [a, ap] : actions) {
    if (a < 0 || a > 1 || ap < 0 || ap > 1) throw DomainError("empirical_joint: actions must be 0 or 1");
  }
  return prob::JointDist2(outer_counts(actions) / static_cast<double>(actions.size()));
}

Estimates::Estimates(std::size_t n_types, const prob::JointDist2& initial)
    : n_(n_types), est_(n_types * n_types, initial) {
  if (initial.size() != 2) throw ShapeError("Estimates: binary joint distribution required");
  for (std::size_t n = 0; n < n_; ++n)
    for (std::size_t m = n + 1; m < n_; ++m) est_[m * n_ + n] = initial.transposed();
}

void Estimates::set(std::size_t n, std::size_t m, const prob::JointDist2& j) {
  est_[n * n_ + m] = j;
  est_[m * n_ + n] = j.transposed();
  if (n == m) est_[n * n_ + n] = j;
}

PlayPair conditional_play(const AgentType& n, const AgentType& n_opp,
                          const std::optional<prob::JointDist2>& obs, const games::RewardMatrix& r,
                          const norms::NashSolution& nash) {
  const norms::Policy np = norms::nash_policy(nash);
  if (!obs) return {np, np, false, false, true};
  const bool own_ok = !n.is_default && norms::is_best_response(n.prescription, n_opp.prescription, *obs, r);
  const bool opp_ok =
      !n_opp.is_default && norms::is_best_response(n_opp.prescription, n.prescription, obs->transposed(), r);
  return {own_ok ? n.prescription : np, opp_ok ? n_opp.prescription : np, own_ok, opp_ok, false};
}

StepResult step(const std::vector<AgentType>& types, const Population& pop, const Estimates& est,
                const Eigen::MatrixXd& prev_gamma, const games::RewardMatrix& r,
                const norms::NashSolution& nash, std::uint64_t seed, std::size_t round) {
  const std::size_t T = types.size();
  if (pop.n_types != T || est.n_types() != T) throw ShapeError("step: type count mismatch");
  if (prev_gamma.rows() != static_cast<Eigen::Index>(T) || prev_gamma.cols() != static_cast<Eigen::Index>(T)) {
    throw ShapeError("step: previous Γ has the wrong shape");
  }
  const std::size_t N = pop.size();

  // Conditional play only depends on the ordered type pair.
  std::vector<PlayPair> play;
  play.reserve(T * T);
  for (std::size_t n = 0; n < T; ++n)
    for (std::size_t m = 0; m < T; ++m)
      play.push_back(conditional_play(types[n], types[m], est.get(n, m), r, nash));

  StepResult out{pair_agents(N, derive_seed(seed, {round, kGamePairing})),
                 std::vector<int>(N, 0),
                 std::vector<double>(N, 0.0),
                 est,
                 prev_gamma,
                 std::vector<bool>(T * T, false),
                 0};

  parallel_chunks(out.pairs.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto [i, j] = out.pairs[p];
      const std::size_t n = pop.type_of[i];
      const std::size_t m = pop.type_of[j];
      Rng rng(derive_seed(seed, {round, kGamePlay, p}));
      const auto& J = est.get(n, m).entries();
      const double w[4] = {J(0, 0), J(0, 1), J(1, 0), J(1, 1)};
      const std::size_t cell = rng.categorical(w);
      const int o = static_cast<int>(cell / 2);
      const int op = static_cast<int>(cell % 2);
      const PlayPair& pp = play[n * T + m];
      const int a = sample_action(pp.own, o, rng);
      const int ap = sample_action(pp.opp, op, rng);
      out.actions[i] = a;
      out.actions[j] = ap;
      out.payoffs[i] = r(a, ap);
      out.payoffs[j] = r(ap, a);
    }
  });

  // Action counts per unordered type pair, oriented with the lower type on rows.
  std::vector<Eigen::MatrixXd> counts(T * T, Eigen::MatrixXd::Zero(2, 2));
  std::vector<double> totals(T * T, 0.0);
  for (std::size_t p = 0; p < out.pairs.size(); ++p) {
    const auto [i, j] = out.pairs[p];
    std::size_t n = pop.type_of[i];
    std::size_t m = pop.type_of[j];
    int a = out.actions[i];
    int ap = out.actions[j];
    const PlayPair& pp = play[n * T + m];
    if (!pp.own_rational && !types[n].is_default) ++out.fallbacks;
    if (!pp.opp_rational && !types[m].is_default) ++out.fallbacks;
    if (n > m) {
      std::swap(n, m);
      std::swap(a, ap);
    }
    counts[n * T + m](a, ap) += 1.0;
    totals[n * T + m] += 1.0;
    if (n == m) {
      counts[n * T + m](ap, a) += 1.0;
      totals[n * T + m] += 1.0;
    }
  }
  for (std::size_t n = 0; n < T; ++n) {
    for (std::size_t m = n; m < T; ++m) {
      if (totals[n * T + m] == 0.0) continue;
      const prob::JointDist2 j(counts[n * T + m] / totals[n * T + m]);
      out.estimates.set(n, m, j);
      out.observed[n * T + m] = true;
      out.observed[m * T + n] = true;
      const auto& e = j.entries();
      const auto ni = static_cast<Eigen::Index>(n);
      const auto mi = static_cast<Eigen::Index>(m);
      out.gamma(ni, mi) = r(0, 0) * e(0, 0) + r(0, 1) * e(0, 1) + r(1, 0) * e(1, 0) + r(1, 1) * e(1, 1);
      out.gamma(mi, ni) = r(0, 0) * e(0, 0) + r(0, 1) * e(1, 0) + r(1, 0) * e(0, 1) + r(1, 1) * e(1, 1);
    }
  }
  return out;
}

double adoption_probability(double delta_f, double beta) {
  if (std::isinf(beta)) return delta_f > 0.0 ? 1.0 : 0.0;
  const double z = beta * delta_f;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Population imitation_update(const Population& pop, std::span<const double> payoffs, double beta,
                            std::uint64_t seed, std::size_t round) {
  if (!(beta >= 0.0)) throw DomainError("imitation_update: beta must be >= 0");
  if (payoffs.size() != pop.size()) throw ShapeError("imitation_update: one payoff per agent required");
  Population next = pop;
  const Pairing pairs = pair_agents(pop.size(), derive_seed(seed, {round, kImitationPairing}));
  Rng rng(derive_seed(seed, {round, kImitationCoin}));
  for (const auto& [i, j] : pairs) {
    const bool i_focal = rng.bernoulli(0.5);
    const std::size_t focal = i_focal ? i : j;
    const std::size_t model = i_focal ? j : i;
    const double p = adoption_probability(payoffs[model] - payoffs[focal], beta);
    if (rng.uniform() < p) next.type_of[focal] = pop.type_of[model];
  }
  return next;
}

void Config::validate() const {
  if (N == 0 || N % 2 != 0) throw DomainError("N must be even and positive");
  if (!(beta >= 0.0)) throw DomainError("beta must be >= 0");
  if (types.empty()) throw DomainError("at least one agent type is required");
  for (std::size_t i = 0; i < types.size(); ++i)
    for (std::size_t j = i + 1; j < types.size(); ++j)
      if (types[i] == types[j]) throw DomainError("agent type '" + types[i] + "' listed twice");
  if (initial_mix.size() != 0 && initial_mix.size() != static_cast<Eigen::Index>(types.size())) {
    throw DomainError("initial mix must have one entry per type");
  }
  games::chicken_reward(B, L);
  prob::signal_dist(j0);
}

namespace {

Eigen::VectorXd mix_of(const Config& c) {
  if (c.initial_mix.size() != 0) return c.initial_mix;
  return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(c.types.size()),
                                   1.0 / static_cast<double>(c.types.size()));
}

std::vector<AgentType> types_of(const Config& c, const norms::NashSolution& nash) {
  std::vector<AgentType> t;
  for (const auto& s : c.types) t.push_back(parse_type(s, nash));
  return t;
}

std::vector<prob::JointDist2> flatten(const Estimates& e) {
  std::vector<prob::JointDist2> out;
  for (std::size_t n = 0; n < e.n_types(); ++n)
    for (std::size_t m = 0; m < e.n_types(); ++m) out.push_back(e.get(n, m));
  return out;
}

// Expected Γ when every type pair plays against the given estimates.
Eigen::MatrixXd expected_gamma(const std::vector<AgentType>& types, const Estimates& est,
                               const games::RewardMatrix& r, const norms::NashSolution& nash) {
  const std::size_t T = types.size();
  Eigen::MatrixXd g(T, T);
  for (std::size_t n = 0; n < T; ++n) {
    for (std::size_t m = 0; m < T; ++m) {
      const PlayPair pp = conditional_play(types[n], types[m], est.get(n, m), r, nash);
      g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)) =
          norms::avg_reward(pp.own, pp.opp, est.get(n, m), r);
    }
  }
  return g;
}

}  // namespace

Run run(const Config& config) {
  config.validate();
  const auto r = games::chicken_reward(config.B, config.L);
  const auto nash = norms::mixed_nash_chicken(config.B, config.L);
  Run out;
  out.types = types_of(config, nash);
  Population pop = make_population(config.N, mix_of(config));
  Estimates est(out.types.size(), prob::signal_dist(config.j0));
  Eigen::MatrixXd gamma = expected_gamma(out.types, est, r, nash);
  out.rounds.push_back({pop.frequencies(), gamma, flatten(est), 0});
  for (std::size_t t = 0; t < config.rounds; ++t) {
    StepResult s = step(out.types, pop, est, gamma, r, nash, config.seed, t);
    if (config.imitation) pop = imitation_update(pop, s.payoffs, config.beta, config.seed, t);
    est = std::move(s.estimates);
    gamma = std::move(s.gamma);
    out.rounds.push_back({pop.frequencies(), gamma, flatten(est), s.fallbacks});
  }
  return out;
}

namespace {

Eigen::VectorXd replicator_round(const Eigen::VectorXd& x, const Eigen::MatrixXd& g, double tau) {
  if (!(tau > 0.0)) return x;
  const std::size_t sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tau / 0.01)));
  replicator::IntegrateOptions opt;
  opt.dt = tau / static_cast<double>(sub);
  opt.t_end = tau;
  opt.record_every = 0;
  return replicator::integrate(replicator::SimplexState(x), g, opt).states.back().x();
}

}  // namespace

MeanField mean_field(const Config& config) {
  config.validate();
  if (std::isinf(config.beta)) throw DomainError("mean_field: beta must be finite");
  const auto r = games::chicken_reward(config.B, config.L);
  const auto nash = norms::mixed_nash_chicken(config.B, config.L);
  const auto types = types_of(config, nash);
  const std::size_t T = types.size();
  Estimates est(T, prob::signal_dist(config.j0));
  MeanField out;
  Eigen::VectorXd x = make_population(config.N, mix_of(config)).frequencies();
  out.frequencies.push_back(x);
  const double tau = config.beta / 4.0;
  for (std::size_t t = 0; t < config.rounds; ++t) {
    Estimates next = est;
    Eigen::MatrixXd g(T, T);
    for (std::size_t n = 0; n < T; ++n) {
      for (std::size_t m = n; m < T; ++m) {
        const PlayPair pp = conditional_play(types[n], types[m], est.get(n, m), r, nash);
        const prob::JointDist2 j(norms::joint_action(pp.own, est.get(n, m), pp.opp));
        next.set(n, m, j);
        const auto ni = static_cast<Eigen::Index>(n);
        const auto mi = static_cast<Eigen::Index>(m);
        g(ni, mi) = prob::expectation(r.entries(), j);
        g(mi, ni) = prob::expectation(r.entries(), j.transposed());
      }
    }
    out.gamma.push_back(g);
    if (config.imitation) x = replicator_round(x, g, tau);
    out.frequencies.push_back(x);
    est = std::move(next);
  }
  return out;
}

std::vector<Eigen::VectorXd> matched_replicator(const Run& run, double beta) {
  if (!(beta >= 0.0) || std::isinf(beta)) throw DomainError("matched_replicator: beta must be finite and >= 0");
  if (run.rounds.empty()) throw ShapeError("matched_replicator: empty run");
  std::vector<Eigen::VectorXd> path{run.rounds.front().frequencies};
  for (std::size_t t = 1; t < run.rounds.size(); ++t) {
    path.push_back(replicator_round(path.back(), run.rounds[t].gamma, beta / 4.0));
  }
  return path;
}

io::CsvTable to_table(const Run& run) {
  using io::format_double;
  io::CsvTable t;
  const std::size_t T = run.types.size();
  t.header.push_back("round");
  for (const auto& ty : run.types) t.header.push_back("freq_" + ty.label);
  for (std::size_t n = 0; n < T; ++n)
    for (std::size_t m = 0; m < T; ++m) t.header.push_back("gamma_" + std::to_string(n) + "_" + std::to_string(m));
  for (std::size_t n = 0; n < T; ++n)
    for (std::size_t m = 0; m < T; ++m)
      for (const char* cell : {"00", "01", "10", "11"})
        t.header.push_back("est_" + std::to_string(n) + "_" + std::to_string(m) + "_" + cell);
  t.header.push_back("fallbacks");
  for (std::size_t k = 0; k < run.rounds.size(); ++k) {
    const Round& rd = run.rounds[k];
    std::vector<std::string> row{std::to_string(k)};
    for (Eigen::Index i = 0; i < rd.frequencies.size(); ++i) row.push_back(format_double(rd.frequencies(i)));
    for (Eigen::Index n = 0; n < rd.gamma.rows(); ++n)
      for (Eigen::Index m = 0; m < rd.gamma.cols(); ++m) row.push_back(format_double(rd.gamma(n, m)));
    for (const auto& e : rd.estimates)
      for (int a = 0; a < 2; ++a)
        for (int ap = 0; ap < 2; ++ap) row.push_back(format_double(e(a, ap)));
    row.push_back(std::to_string(rd.fallbacks));
    t.add_row(std::move(row));
  }
  return t;
}

}  // namespace normdyn::abm
