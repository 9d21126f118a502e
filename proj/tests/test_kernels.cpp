#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <vector>

#include "helpers.hpp"
#include "normdyn/kernels.hpp"

using namespace normdyn;
using namespace normdyn::kernels;

namespace {

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct IsaGuard {
  ~IsaGuard() { set_isa_override(std::nullopt); }
};

}  // namespace

TEST_CASE("override pins the scalar path") {
  IsaGuard guard;
  set_isa_override(Isa::Scalar);
  CHECK(active_isa() == Isa::Scalar);
  set_isa_override(std::nullopt);
  if (std::getenv("NORMDYN_FORCE_SCALAR") == nullptr) CHECK(active_isa() == detected_isa());
  CHECK(to_string(Isa::Scalar) == "scalar");
}

TEST_CASE("replicator flow kernel: scalar and AVX2 agree bit for bit") {
  if (detected_isa() != Isa::Avx2) {
    MESSAGE("AVX2 not available; only the scalar path is exercised");
    return;
  }
  Rng rng(41);
  for (std::size_t n : {2u, 4u, 5u, 17u}) {
    for (std::size_t m : {1u, 3u, 4u, 9u, 64u, 101u}) {
      const Eigen::MatrixXd g = testutil::random_matrix(rng, n, n, -2, 4);
      std::vector<double> gamma(n * n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) gamma[i * n + j] = g(i, j);
      std::vector<double> x(n * m);
      for (std::size_t k = 0; k < m; ++k) {
        const Eigen::VectorXd s = testutil::random_simplex(rng, n);
        for (std::size_t i = 0; i < n; ++i) x[i * m + k] = s(i);
      }
      std::vector<double> a(n * m), b(n * m);
      replicator_flow_batch(gamma, n, x, a, m, Isa::Scalar);
      replicator_flow_batch(gamma, n, x, b, m, Isa::Avx2);
      CHECK(bit_equal(a, b));
    }
  }
}

TEST_CASE("chicken gamma kernel: scalar and AVX2 agree bit for bit") {
  Rng rng(43);
  for (std::size_t m : {1u, 4u, 7u, 200u}) {
    std::vector<double> b(m), L(m);
    for (std::size_t k = 0; k < m; ++k) {
      b[k] = rng.uniform();
      L[k] = 0.01 + 2.5 * rng.uniform();
    }
    std::vector<double> s(16 * m), v(16 * m);
    chicken_gamma_batch(b, L, s, Isa::Scalar);
    if (detected_isa() == Isa::Avx2) {
      chicken_gamma_batch(b, L, v, Isa::Avx2);
      CHECK(bit_equal(s, v));
    }
    // Column 0 is the Nash value (3 + L)/(1 + L) for every row.
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t r = 0; r < 4; ++r)
        CHECK(s[(4 * r) * m + k] == doctest::Approx((3 + L[k]) / (1 + L[k])).epsilon(1e-13));
  }
}

TEST_CASE("replicator kernel matches a direct evaluation") {
  Rng rng(47);
  const std::size_t n = 4, m = 5;
  const Eigen::MatrixXd g = testutil::random_matrix(rng, n, n);
  std::vector<double> gamma(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) gamma[i * n + j] = g(i, j);
  std::vector<Eigen::VectorXd> states;
  std::vector<double> x(n * m), out(n * m);
  for (std::size_t k = 0; k < m; ++k) {
    states.push_back(testutil::random_simplex(rng, n));
    for (std::size_t i = 0; i < n; ++i) x[i * m + k] = states[k](i);
  }
  replicator_flow_batch(gamma, n, x, out, m);
  for (std::size_t k = 0; k < m; ++k) {
    const Eigen::VectorXd f = g * states[k];
    const double mean = states[k].dot(f);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(out[i * m + k] == doctest::Approx(states[k](i) * (f(i) - mean)).epsilon(1e-13));
  }
}
