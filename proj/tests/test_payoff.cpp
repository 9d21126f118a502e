#include <doctest.h>

#include "normdyn/errors.hpp"
#include "normdyn/payoff.hpp"

using namespace normdyn;
using namespace normdyn::payoff;
using prob::signal_dist;

namespace {

PayoffMatrix chicken_gamma(double b, double L) {
  const auto nash = norms::mixed_nash_chicken(3, L);
  return build_gamma(chicken_strategies(nash), signal_dist({b, 0}), games::chicken_reward(3, L), nash);
}

}  // namespace

TEST_CASE("chicken gamma at b = L = 1/2") {
  const auto g = chicken_gamma(0.5, 0.5);
  REQUIRE(g.size() == 4);
  const double rho = 7.0 / 3.0;
  for (std::size_t n = 0; n < 4; ++n) CHECK(g(n, 0) == doctest::Approx(rho).epsilon(1e-14));
  CHECK(g(3, 3) == 0.0);
  CHECK(g(2, 2) == doctest::Approx(2.625).epsilon(1e-14));
  CHECK(g(1, 1) == doctest::Approx(1.125).epsilon(1e-14));
  CHECK(g(1, 2) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(g(2, 1) == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(g(1, 3) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(g(2, 3) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(g(3, 1) == doctest::Approx(0.875).epsilon(1e-14));
  CHECK(g(3, 2) == doctest::Approx(2.625).epsilon(1e-14));
  CHECK(g(0, 3) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(g.substitution_count() == 0);
  CHECK(g.labels().size() == 4);
}

TEST_CASE("column 0 is constant at the Nash value") {
  for (double L : {0.1, 0.5, 1.0, 1.7}) {
    for (double b : {0.0, 0.3, 0.8, 1.0}) {
      const auto g = chicken_gamma(b, L);
      for (std::size_t n = 0; n < 4; ++n) CHECK(g(n, 0) == doctest::Approx((L + 3) / (L + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("closed-form entries") {
  // Hand-derived at g = 0.
  for (double b : {0.1, 0.4, 0.7}) {
    for (double L : {0.25, 0.5, 1.5}) {
      const auto g = chicken_gamma(b, L);
      CHECK(g(0, 0) == doctest::Approx((3 + L) / (1 + L)).epsilon(1e-13));
      CHECK(g(2, 2) == doctest::Approx(3 * b + (1 - b) * (4 + L) / 2).epsilon(1e-13));
      CHECK(g(1, 1) == doctest::Approx((1 - b) * (4 + L) / 2).epsilon(1e-13));
      CHECK(g(1, 3) == doctest::Approx((1 - b) / 2).epsilon(1e-13));
      CHECK(g(0, 3) == doctest::Approx(1 / (1 + L)).epsilon(1e-13));
    }
  }
}

TEST_CASE("closed form matches the generic builder on a 50 x 50 grid") {
  double worst = 0.0;
  for (int ib = 0; ib < 50; ++ib) {
    for (int iL = 0; iL < 50; ++iL) {
      const double b = ib / 49.0;
      const double L = 0.05 + 2.45 * iL / 49.0;
      const auto closed = chicken_gamma_closed_form(b, L);
      const auto generic = chicken_gamma(b, L);
      worst = std::max(worst, (closed.entries() - generic.entries()).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst <= 1e-12);
  CHECK_THROWS_AS(chicken_gamma_closed_form(0.5, 0.0), DomainError);
}

TEST_CASE("null norms are substituted by the default") {
  const auto list = norms::enumerate_norms(2, 2);
  const auto nash = norms::mixed_nash_chicken(3, 0.5);
  const auto J = signal_dist({0.4, 0});
  const auto r = games::chicken_reward(3, 0.5);
  const auto g = build_gamma(norm_strategies(list, nash), J, r, nash);
  REQUIRE(g.size() == 17);
  CHECK_FALSE(g.substituted(0));
  std::size_t null_count = 0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const bool null_norm = !norms::is_rational(list[i], J, r);
    CHECK(g.substituted(i + 1) == null_norm);
    if (null_norm) {
      ++null_count;
      CHECK(*g.effective_policy(i + 1) == norms::nash_policy(nash));
      for (std::size_t m = 0; m < g.size(); ++m) {
        CHECK(g(i + 1, m) == doctest::Approx(g(0, m)).epsilon(1e-14));
        CHECK(g(m, i + 1) == doctest::Approx(g(m, 0)).epsilon(1e-14));
      }
    }
  }
  CHECK(g.substitution_count() == null_count);
  CHECK(g.index_of_norm(5) == std::optional<std::size_t>{6});
  CHECK_FALSE(g.index_of_norm(99).has_value());
}

TEST_CASE("build_gamma validation") {
  const auto nash = norms::mixed_nash_chicken(3, 0.5);
  CHECK_THROWS_AS(build_gamma({}, signal_dist({0.4, 0}), games::chicken_reward(3, 0.5), nash), ShapeError);
  std::vector<Strategy> bad{Strategy{"follow", norms::signal_following(), std::nullopt, std::nullopt}};
  CHECK_THROWS_AS(build_gamma(bad, signal_dist({0.4, 0}), games::chicken_reward(3, 0.5), nash), DomainError);
}
