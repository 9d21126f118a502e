#include <doctest.h>

#include <array>
#include <set>

#include "helpers.hpp"
#include "normdyn/errors.hpp"
#include "normdyn/norms.hpp"
#include "normdyn/payoff.hpp"

using namespace normdyn;
using namespace normdyn::norms;
using prob::JointDist2;
using prob::signal_dist;

namespace {

const auto kR = games::chicken_reward(3, 0.5);

Norm make_norm(const Policy& p, const Policy& d) { return {p, d, 0}; }

double brute_force_reward(const Policy& pi, const Policy& pi_opp, const JointDist2& j,
                          const games::RewardMatrix& r) {
  double s = 0.0;
  for (int o = 0; o < 2; ++o)
    for (int op = 0; op < 2; ++op)
      for (int a = 0; a < 2; ++a)
        for (int ap = 0; ap < 2; ++ap)
          s += j(o, op) * pi.entries()(a, o) * pi_opp.entries()(ap, op) * r(a, ap);
  return s;
}

std::vector<NormClass> classify_at(double b, double g, double B, double L) {
  const auto r = games::chicken_reward(B, L);
  const auto J = signal_dist({b, g});
  const auto nash = mixed_nash_chicken(B, L);
  const auto list = enumerate_norms(2, 2);
  const auto gamma = payoff::build_gamma(payoff::norm_strategies(list, nash), J, r, nash);
  return classify_all(list, J, r, gamma);
}

}  // namespace

TEST_CASE("policy validation") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.2, 0.4, 0.8;
  CHECK_THROWS_AS(Policy{bad}, DomainError);
  CHECK(signal_following().deterministic());
  CHECK(signal_following().bits() == "01");
  CHECK(anti_signal().action(0) == 1);
  CHECK(nash_policy(mixed_nash_chicken(3, 0.5)).observation_independent());
  CHECK_FALSE(nash_policy(mixed_nash_chicken(3, 0.5)).deterministic());
  CHECK_THROWS_AS(nash_policy(mixed_nash_chicken(3, 0.5)).action(0), DomainError);
  CHECK_THROWS_AS(Policy::from_actions(std::vector{0, 2}, 2), DomainError);
}

TEST_CASE("enumerate_norms") {
  const auto list = enumerate_norms(2, 2);
  CHECK(list.size() == 16);
  std::set<std::string> prescriptions;
  for (std::size_t i = 0; i < list.size(); ++i) {
    CHECK(list[i].id == i);
    prescriptions.insert(list[i].prescription.bits());
    CHECK(list[i].prescription.deterministic());
    CHECK(list[i].description.deterministic());
  }
  CHECK(prescriptions.size() == 4);
  CHECK(list[5].prescription == signal_following());
  CHECK(list[5].description == signal_following());
  CHECK(list[3].prescription == always_stop());
  CHECK(list[3].description == always_go());
  CHECK(enumerate_norms(1, 1).size() == 1);
  CHECK(enumerate_policies(3, 2).size() == 9);
}

TEST_CASE("avg_reward") {
  CHECK(avg_reward(signal_following(), signal_following(), signal_dist({0.5, 0}), kR) ==
        doctest::Approx(2.625).epsilon(1e-14));
  CHECK(avg_reward(always_go(), always_go(), signal_dist({0.3, 0.1}), kR) == 0.0);
  CHECK(avg_reward(always_stop(), always_go(), signal_dist({0.3, 0.1}), kR) == doctest::Approx(1.0));
}

TEST_CASE("avg_reward matches brute force on random instances") {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const JointDist2 j(testutil::random_joint(rng, 2));
    const Policy pi(testutil::random_column_stochastic(rng, 2, 2));
    const Policy po(testutil::random_column_stochastic(rng, 2, 2));
    const games::RewardMatrix r(Eigen::Matrix2d(testutil::random_matrix(rng, 2, 2, -3, 3)));
    CHECK(std::abs(avg_reward(pi, po, j, r) - brute_force_reward(pi, po, j, r)) <= 1e-12);
  }
}

TEST_CASE("best_response_per_obs") {
  const auto br = best_response_per_obs(signal_following(), signal_dist({0.4, 0}), kR);
  REQUIRE(br.size() == 2);
  CHECK(br[0].actions == std::vector<int>{0});
  CHECK(br[0].values[0] == doctest::Approx(15.0 / 7.0));
  CHECK(br[0].values[1] == doctest::Approx(2.0));
  CHECK(br[1].actions == std::vector<int>{1});
  CHECK(br[1].values[0] == doctest::Approx(3.0));
  CHECK(br[1].values[1] == doctest::Approx(3.5));

  const auto br6 = best_response_per_obs(signal_following(), signal_dist({0.6, 0}), kR);
  CHECK(br6[0].actions == std::vector<int>{1});
  CHECK(br6[0].values[0] == doctest::Approx(2.5));
  CHECK(br6[0].values[1] == doctest::Approx(2.625));

  // b = 1, g = 0 never shows green.
  const auto degenerate = best_response_per_obs(signal_following(), signal_dist({1.0, 0}), kR);
  CHECK(degenerate[1].unobserved);
  CHECK(degenerate[1].actions == std::vector<int>{0, 1});
}

TEST_CASE("best-response sets are invariant under positive affine reward maps") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const JointDist2 j(testutil::random_joint(rng, 2));
    const Policy opp(testutil::random_column_stochastic(rng, 2, 2));
    const games::RewardMatrix r(Eigen::Matrix2d(testutil::random_matrix(rng, 2, 2, -3, 3)));
    const auto base = best_response_per_obs(opp, j, r);
    for (double alpha : {0.5, 2.0}) {
      for (double beta : {-1.0, 1.0}) {
        const auto t = best_response_per_obs(opp, j, r.affine(alpha, beta));
        for (std::size_t o = 0; o < 2; ++o) CHECK(t[o].actions == base[o].actions);
      }
    }
  }
  // Ties survive the map too.
  const auto tie = best_response_per_obs(signal_following(), signal_dist({0.5, 0}), kR);
  CHECK(tie[0].actions == std::vector<int>{0, 1});
  const auto tie2 = best_response_per_obs(signal_following(), signal_dist({0.5, 0}), kR.affine(2.0, -1.0));
  CHECK(tie2[0].actions == std::vector<int>{0, 1});
}

TEST_CASE("is_rational") {
  CHECK(is_rational(make_norm(signal_following(), signal_following()), signal_dist({0.4, 0}), kR));
  CHECK_FALSE(is_rational(make_norm(signal_following(), signal_following()), signal_dist({0.6, 0}), kR));
  CHECK_FALSE(is_rational(make_norm(always_stop(), always_stop()), signal_dist({0.4, 0}), kR));
  CHECK(is_rational(make_norm(always_stop(), always_go()), signal_dist({0.4, 0}), kR));
}

TEST_CASE("closed-form rationality region agrees with best-response checks") {
  const Norm follow = make_norm(signal_following(), signal_following());
  int compared = 0;
  for (int ib = 0; ib < 100; ++ib) {
    for (int iL = 0; iL < 100; ++iL) {
      const double b = ib / 99.0;
      const double L = 0.025 * (iL + 1);
      const auto region = rationality_region(b, 0.0, L);
      if (region.any_marginal()) continue;
      const bool closed = region.green_ok() && region.red_ok() && region.positivity_ok();
      CHECK(closed == is_rational(follow, signal_dist({b, 0.0}), games::chicken_reward(3, L)));
      ++compared;
    }
  }
  CHECK(compared > 9000);
}

TEST_CASE("closed-form region with g > 0") {
  const Norm follow = make_norm(signal_following(), signal_following());
  for (double g : {0.05, 0.1, 0.2}) {
    for (double L : {0.3, 0.8, 1.5}) {
      for (int ib = 0; ib <= 50; ++ib) {
        const double b = g + (1.0 - g) * ib / 50.0;
        const auto region = rationality_region(b, g, L);
        if (region.any_marginal() || !region.positivity_ok()) continue;
        const bool closed = region.green_ok() && region.red_ok();
        CHECK(closed == is_rational(follow, signal_dist({b, g}), games::chicken_reward(3, L)));
      }
    }
  }
}

TEST_CASE("rationality_region") {
  const auto a = rationality_region(0.4, 0, 0.5);
  CHECK(a.green_ok());
  CHECK(a.red_ok());
  CHECK(a.positivity_ok());
  CHECK(rationality_region(0.6, 0, 0.5).red == Bound::Violated);
  CHECK(rationality_region(0.5, 0, 0.5).red == Bound::Marginal);
  CHECK(rationality_region(0.0, 0, 0.5).positivity == Bound::Marginal);
  CHECK_THROWS_AS(rationality_region(0.4, 0, 0), DomainError);
}

TEST_CASE("classification at the canonical point") {
  const auto list = enumerate_norms(2, 2);
  const auto classes = classify_at(0.4, 0, 3, 0.5);
  CHECK(classes[5].consistent);
  CHECK(classes[5].evolutionarily_stable);
  // Always-go prescription with always-stop description.
  CHECK(list[12].prescription == always_go());
  CHECK(list[12].description == always_stop());
  CHECK(classes[12].rational);
  CHECK_FALSE(classes[12].consistent);
}

TEST_CASE("classification hierarchy holds across parameters") {
  for (double b : {0.0, 0.1, 0.3, 0.5, 0.7, 1.0}) {
    for (double L : {0.2, 0.5, 1.0, 1.9, 2.5}) {
      for (double g : {0.0, 0.05}) {
        if (b < g) continue;
        for (const auto& c : classify_at(b, g, 3, L)) {
          CHECK(c.null == !c.rational);
          CHECK((!c.consistent || c.empirically_validatable));
          CHECK((!c.empirically_validatable || c.rational));
          CHECK((!c.evolutionarily_stable || c.consistent));
          CHECK((!c.best_response || c.evolutionarily_stable));
          CHECK(c.inconsistent == (c.empirically_validatable && !c.consistent));
        }
      }
    }
  }
}

TEST_CASE("correlated equilibrium and factorization") {
  const auto follow = signal_following();
  CHECK(is_correlated_equilibrium(follow, follow, signal_dist({0.4, 0}), kR));
  CHECK_FALSE(is_correlated_equilibrium(follow, follow, signal_dist({0.6, 0}), kR));
  CHECK_FALSE(is_correlated_equilibrium(always_go(), always_go(), signal_dist({0.4, 0}), kR));
  CHECK_FALSE(is_nash_factorizable(follow, follow, signal_dist({0.4, 0}), 1e-12));
  CHECK_THROWS_AS(is_correlated_equilibrium(nash_policy(mixed_nash_chicken(3, .5)), follow,
                                            signal_dist({0.4, 0}), kR),
                  DomainError);

  const auto nash = nash_policy(mixed_nash_chicken(3, 0.5));
  CHECK(is_nash_factorizable(nash, nash, signal_dist({0.4, 0.1}), 1e-12));
  Eigen::MatrixXd diag(2, 2);
  diag << 0.5, 0, 0, 0.5;
  CHECK_FALSE(is_nash_factorizable(follow, follow, JointDist2(diag), 1e-12));
  CHECK(is_nash_factorizable(follow, follow, JointDist2::uniform(2), 1e-12));
}

TEST_CASE("correlated equilibrium with a nonsymmetric joint uses the transpose for the opponent") {
  Eigen::MatrixXd m(2, 2);
  m << 0.3, 0.4, 0.1, 0.2;
  const JointDist2 j(m);
  const auto follow = signal_following();
  const bool expected = is_best_response(follow, follow, j, kR) && is_best_response(follow, follow, j.transposed(), kR);
  CHECK(is_correlated_equilibrium(follow, follow, j, kR) == expected);
}

TEST_CASE("mixed_nash_chicken") {
  const auto a = mixed_nash_chicken(3, 0.5);
  CHECK(a.p_stop == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(a.rho == doctest::Approx(7.0 / 3.0).epsilon(1e-15));
  const auto b = mixed_nash_chicken(3, 2);
  CHECK(b.p_stop == doctest::Approx(1.0 / 3.0));
  CHECK(b.rho == doctest::Approx(5.0 / 3.0));
  const auto c = mixed_nash_chicken(3, 1);
  CHECK(c.p_stop == doctest::Approx(0.5));
  CHECK(c.rho == doctest::Approx(2.0));
  CHECK_THROWS_AS(mixed_nash_chicken(3, 0), DomainError);

  // The mixed strategy is indifferent and earns rho against itself.
  for (double L : {0.3, 0.5, 1.0, 2.0}) {
    const auto n = mixed_nash_chicken(3, L);
    const auto r = games::chicken_reward(3, L);
    const auto pol = nash_policy(n);
    CHECK(avg_reward(pol, pol, signal_dist({0.4, 0}), r) == doctest::Approx(n.rho).epsilon(1e-12));
    CHECK(avg_reward(always_stop(), pol, signal_dist({0.4, 0}), r) ==
          doctest::Approx(avg_reward(always_go(), pol, signal_dist({0.4, 0}), r)).epsilon(1e-12));
  }
}
