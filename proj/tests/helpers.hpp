#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "normdyn/rng.hpp"

namespace testutil {

inline Eigen::MatrixXd random_matrix(normdyn::Rng& rng, Eigen::Index r, Eigen::Index c, double lo = -1.0,
                                     double hi = 1.0) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = lo + (hi - lo) * rng.uniform();
  return m;
}

inline Eigen::VectorXd random_simplex(normdyn::Rng& rng, Eigen::Index n) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.exponential();
  return x / x.sum();
}

inline Eigen::MatrixXd random_joint(normdyn::Rng& rng, Eigen::Index k) {
  Eigen::MatrixXd m = random_matrix(rng, k, k, 0.0, 1.0);
  return m / m.sum();
}

inline Eigen::MatrixXd random_column_stochastic(normdyn::Rng& rng, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd m = random_matrix(rng, r, c, 0.0, 1.0);
  for (Eigen::Index j = 0; j < c; ++j) m.col(j) /= m.col(j).sum();
  return m;
}

}  // namespace testutil
