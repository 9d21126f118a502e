#include <doctest.h>

#include <cmath>
#include <complex>
#include <algorithm>

#include "helpers.hpp"
#include "normdyn/errors.hpp"
#include "normdyn/payoff.hpp"
#include "normdyn/replicator.hpp"

using namespace normdyn;
using namespace normdyn::replicator;

namespace {

Eigen::MatrixXd chicken(double b, double L) { return payoff::chicken_gamma_closed_form(b, L).entries(); }

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Eigen::MatrixXd finite_difference_jacobian(const Eigen::VectorXd& x, const Eigen::MatrixXd& g) {
  const double h = 1e-6;
  Eigen::MatrixXd j(x.size(), x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    Eigen::VectorXd up = x, dn = x;
    up(c) += h;
    dn(c) -= h;
    j.col(c) = (flow(up, g) - flow(dn, g)) / (2 * h);
  }
  return j;
}

}  // namespace

TEST_CASE("flow examples") {
  const auto g = chicken(0.5, 0.5);
  const auto f = flow(SimplexState::barycenter(4).x(), g);
  CHECK(f(0) == doctest::Approx(0.0234375).epsilon(1e-10));
  CHECK(f(1) == doctest::Approx(-0.015625).epsilon(1e-10));
  CHECK(f(2) == doctest::Approx(0.03125).epsilon(1e-10));
  CHECK(f(3) == doctest::Approx(-0.0390625).epsilon(1e-10));
  CHECK(std::abs(f.sum()) <= 1e-15);

  for (std::size_t n = 0; n < 4; ++n) CHECK(flow(SimplexState::vertex(4, n).x(), g).cwiseAbs().maxCoeff() == 0.0);
  CHECK(flow(SimplexState::barycenter(3).x(), Eigen::MatrixXd::Ones(3, 3)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("simplex state validation") {
  CHECK_THROWS_AS(SimplexState(vec({0.5, 0.6})), DomainError);
  CHECK_THROWS_AS(SimplexState(vec({1.5, -0.5})), DomainError);
  CHECK_THROWS_AS(flow(vec({0.5, 0.5}), Eigen::MatrixXd::Ones(3, 3)), ShapeError);
}

TEST_CASE("flow is unchanged by adding a constant to a column") {
  Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + trial % 5;
    Eigen::MatrixXd g = testutil::random_matrix(rng, n, n);
    const Eigen::VectorXd x = testutil::random_simplex(rng, n);
    Eigen::MatrixXd shifted = g;
    shifted.col(trial % n).array() += 3.7;
    CHECK((flow(x, g) - flow(x, shifted)).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("jacobian matches finite differences") {
  Rng rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + trial % 5;
    const Eigen::MatrixXd g = testutil::random_matrix(rng, n, n, -2, 2);
    const Eigen::VectorXd x = testutil::random_simplex(rng, n);
    CHECK((jacobian(x, g) - finite_difference_jacobian(x, g)).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("vertex jacobian and spectrum closed forms") {
  Rng rng(57);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + trial % 6;
    const Eigen::MatrixXd g = testutil::random_matrix(rng, n, n, -2, 2);
    for (std::size_t v = 0; v < static_cast<std::size_t>(n); ++v) {
      const Eigen::MatrixXd direct = jacobian(SimplexState::vertex(n, v).x(), g);
      CHECK((jacobian_at_vertex(v, g) - direct).cwiseAbs().maxCoeff() <= 1e-14);
      CHECK(spectrum_distance(vertex_spectrum(v, g).eigenvalues, vertex_spectrum_numeric(v, g).eigenvalues) <=
            1e-10);
    }
  }
  CHECK_THROWS_AS(vertex_spectrum(4, chicken(0.4, 0.5)), DomainError);
}

TEST_CASE("signal-following vertex spectrum") {
  const auto g = chicken(0.4, 0.5);
  const auto s = vertex_spectrum(2, g);
  REQUIRE(s.eigenvalues.size() == 4);
  CHECK(s.lambda_max_real < 0.0);
  CHECK(classify_stability(s) == Stability::Stable);
  CHECK(s.lambda_max_real == doctest::Approx(std::max({g(0, 2), g(1, 2), g(3, 2)}) - g(2, 2)).epsilon(1e-14));
  CHECK(s.lambda_max_real == doctest::Approx((-1 + 0.4 + 2 * 0.5 * 0.4) / 2).epsilon(1e-14));
  // Nash vertex has a zero eigenvalue from the constant column.
  CHECK(classify_stability(vertex_spectrum(0, g)) != Stability::Stable);
  CHECK(classify_stability(vertex_spectrum(2, chicken(0.6, 0.5))) == Stability::Unstable);
}

TEST_CASE("eigenvalues") {
  const auto id = eigenvalues(Eigen::MatrixXd::Identity(3, 3));
  for (const auto& e : id) CHECK(std::abs(e - std::complex<double>(1, 0)) <= 1e-12);

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d.diagonal() << -1, 2, 0.5;
  CHECK(spectrum_distance(eigenvalues(d), {{-1, 0}, {2, 0}, {0.5, 0}}) <= 1e-12);

  Eigen::MatrixXd rot(2, 2);
  rot << 0, -1, 1, 0;
  CHECK(spectrum_distance(eigenvalues(rot), {{0, 1}, {0, -1}}) <= 1e-12);
  CHECK(Spectrum::from(eigenvalues(rot)).lambda_max_real == doctest::Approx(0.0));
  CHECK_THROWS_AS(eigenvalues(Eigen::MatrixXd::Zero(2, 3)), ShapeError);
}

TEST_CASE("classify_stability") {
  CHECK(classify_stability(Spectrum::from({{-1, 0}, {-0.5, 2}})) == Stability::Stable);
  CHECK(classify_stability(Spectrum::from({{-1, 0}, {0, 0}})) == Stability::Neutral);
  CHECK(classify_stability(Spectrum::from({{-1, 0}, {1e-3, 0}})) == Stability::Unstable);
  CHECK(to_string(Stability::Neutral) == "neutral");
}

TEST_CASE("integration stays on the simplex") {
  Rng rng(59);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd g = testutil::random_matrix(rng, 4, 4, -1, 3);
    IntegrateOptions o;
    o.t_end = 100.0;
    o.record_every = 50;
    const auto traj = integrate(SimplexState(testutil::random_simplex(rng, 4)), g, o);
    CHECK(traj.times.back() == doctest::Approx(100.0));
    for (const auto& s : traj.states) {
      CHECK(std::abs(s.x().sum() - 1.0) <= 1e-9);
      CHECK(s.x().minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("batch integration is bit-identical to single integration") {
  Rng rng(61);
  const auto g = chicken(0.4, 0.5);
  std::vector<SimplexState> starts;
  for (int i = 0; i < 13; ++i) starts.emplace_back(testutil::random_simplex(rng, 4));
  IntegrateOptions o;
  o.t_end = 20.0;
  o.record_every = 0;
  const auto batch = integrate_terminal_batch(starts, g, o);
  for (std::size_t i = 0; i < starts.size(); ++i) CHECK(batch[i].x() == integrate(starts[i], g, o).states.back().x());

  o.variant = Variant::tanh(2.0);
  const auto tb = integrate_terminal_batch(starts, g, o);
  for (std::size_t i = 0; i < starts.size(); ++i) CHECK(tb[i].x() == integrate(starts[i], g, o).states.back().x());
}

TEST_CASE("random interior points are not fixed points of the chicken game") {
  const auto g = chicken(0.4, 0.5);
  Rng rng(67);
  double smallest = 1e300;
  for (int i = 0; i < 100000; ++i) {
    smallest = std::min(smallest, fixed_point_residual(testutil::random_simplex(rng, 4), g));
  }
  CHECK(smallest > 1e-6);
}

TEST_CASE("fixed point residual") {
  const auto g = chicken(0.4, 0.5);
  for (std::size_t n = 0; n < 4; ++n) CHECK(fixed_point_residual(SimplexState::vertex(4, n).x(), g) == 0.0);
  CHECK(fixed_point_residual(SimplexState::barycenter(4).x(), g) > 0.01);

  // Interior equilibrium of a 2 x 2 sub-game embedded in three strategies.
  Eigen::MatrixXd h(3, 3);
  h << 0, 2, 5, 1, 0, 5, 0, 0, 0;
  CHECK(fixed_point_residual(vec({2.0 / 3.0, 1.0 / 3.0, 0.0}), h) <= 1e-15);
  CHECK(fixed_point_residual(vec({0.5, 0.5, 0.0}), h) > 0.1);
}

TEST_CASE("tanh dynamics reduce to the linear flow under weak selection") {
  Rng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd g = testutil::random_matrix(rng, 4, 4, -1, 1);
    const Eigen::VectorXd x = testutil::random_simplex(rng, 4);
    const double beta = 1e-3;
    CHECK((tanh_flow(x, g, beta) / beta - flow(x, g)).cwiseAbs().maxCoeff() <= 1e-5);
  }
  CHECK_THROWS_AS(tanh_flow(SimplexState::barycenter(2).x(), Eigen::MatrixXd::Ones(2, 2), 0.0), DomainError);
}

TEST_CASE("basin sampling") {
  const auto g = chicken(0.4, 0.5);
  IntegrateOptions o;
  o.t_end = 200.0;
  const auto a = basin_sample(g, 12, 7, o);
  const auto b = basin_sample(g, 12, 7, o);
  CHECK(a.labels == b.labels);
  CHECK(a.samples() == 12);
  std::size_t total = 0;
  for (const auto& [label, count] : a.counts) total += count;
  CHECK(total == 12);
  CHECK(uniform_simplex_sample(4, 7, 3).x() == uniform_simplex_sample(4, 7, 3).x());
  CHECK(uniform_simplex_sample(4, 7, 3).x() != uniform_simplex_sample(4, 7, 4).x());

  const auto flat = basin_sample(Eigen::MatrixXd::Ones(4, 4), 5, 1, o);
  CHECK(flat.share("mixed") == 1.0);
  CHECK_THROWS_AS(basin_sample(g, 0, 1, o), DomainError);
}

TEST_CASE("trajectory labels") {
  Trajectory t;
  CHECK(t.terminal_label() == "mixed");
  t.terminal_vertex = 2;
  CHECK(t.terminal_label() == "vertex:2");
  CHECK(vertex_label(vec({0.995, 0.005}), 1e-2) == std::optional<std::size_t>{0});
  CHECK_FALSE(vertex_label(vec({0.98, 0.02}), 1e-2).has_value());
}
