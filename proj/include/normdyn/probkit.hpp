#pragma once

// Matrix algebra for two-dimensional discrete probability distributions.
//
// Conventions: a joint distribution P_xy is stored with rows indexed by x and
// columns by y. A conditional distribution P_{y|x} is column-stochastic:
// column j holds the distribution of y given x = j.

#include <Eigen/Dense>

#include <cstddef>
#include <utility>

namespace normdyn::prob {

// Tolerance for the sum-to-one and nonnegativity invariants.
inline constexpr double kProbTol = 1e-12;

class Marginal {
 public:
  explicit Marginal(Eigen::VectorXd probs);

  const Eigen::VectorXd& probs() const { return probs_; }
  std::size_t size() const { return static_cast<std::size_t>(probs_.size()); }
  double operator[](std::size_t i) const { return probs_(static_cast<Eigen::Index>(i)); }

 private:
  Eigen::VectorXd probs_;
};

enum class Symmetry { Unchecked, Required };

class JointDist2 {
 public:
  // Throws DomainError unless the matrix is square, nonnegative and sums to
  // one within kProbTol. With Symmetry::Required the matrix must also equal
  // its transpose exactly.
  explicit JointDist2(Eigen::MatrixXd entries, Symmetry symmetry = Symmetry::Unchecked);

  const Eigen::MatrixXd& entries() const { return entries_; }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  bool symmetric() const { return symmetric_; }
  JointDist2 transposed() const;

  static JointDist2 uniform(std::size_t k);

 private:
  Eigen::MatrixXd entries_;
  bool symmetric_ = false;
};

class CondDist {
 public:
  // Columns must be distributions (nonnegative, sum to one within kProbTol).
  explicit CondDist(Eigen::MatrixXd entries);

  const Eigen::MatrixXd& entries() const { return entries_; }
  std::size_t outputs() const { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t inputs() const { return static_cast<std::size_t>(entries_.cols()); }
  // True when every entry is exactly 0 or 1.
  bool deterministic() const;

  static CondDist identity(std::size_t k);

 private:
  Eigen::MatrixXd entries_;
};

// Coordination potential b and exploitation mass g of the symmetric binary
// signal distribution [[b-g, (1-b)/2], [(1-b)/2, g]].
struct SignalParams {
  double b = 0.5;
  double g = 0.0;
};

// Row marginal P·1 and column marginal Pᵀ·1.
std::pair<Marginal, Marginal> marginals(const JointDist2& joint);

// E[f(x,y)] = tr(F Pᵀ) = Σ F_ij P_ij.
double expectation(const Eigen::MatrixXd& values, const JointDist2& joint);

// P_{y|ỹ} · P_{x̃ỹ}ᵀ · P_{x|x̃}ᵀ. Rows of the result are indexed by y and
// columns by x.
JointDist2 compose_conditionals(const CondDist& y_given_yt, const JointDist2& xt_yt,
                                const CondDist& x_given_xt);

bool is_independent(const JointDist2& joint, double tol);

// Binary joint from marginals and Pearson correlation:
//   p_x p_yᵀ + rho·sqrt(σ²_x σ²_y)·[[+1,-1],[-1,+1]],  σ²_i = p_i0 p_i1.
// Throws DomainError when an entry leaves [0,1].
JointDist2 correlation_form(const Marginal& px, const Marginal& py, double rho);

// Inverse of correlation_form for a binary joint. Throws DomainError when a
// marginal is degenerate (zero variance).
double correlation(const JointDist2& joint);

// Throws DomainError for b < g or entries outside [0,1]. b == g is accepted
// (zero red-red mass); strict positivity is a rationality constraint.
JointDist2 signal_dist(SignalParams params);

// Mutual information in bits, with 0·log 0 = 0.
double mutual_information(const JointDist2& joint);

enum class ObservationModel {
  Partition,   // observation matrices must be 0/1 valued
  Stochastic,  // any column-stochastic observation matrices
};

// P_{o|s} diag(p_s) P_{o'|s}ᵀ.
JointDist2 env_from_partitions(const CondDist& o_given_s, const CondDist& op_given_s,
                               const Marginal& p_s,
                               ObservationModel model = ObservationModel::Partition);

}  // namespace normdyn::prob
