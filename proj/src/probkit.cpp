#include "normdyn/probkit.hpp"

#include <cmath>
#include <string>

#include "normdyn/errors.hpp"

namespace normdyn::prob {

namespace {

void check_distribution(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* what) {
  if (!m.allFinite()) throw DomainError(std::string(what) + ": non-finite entry");
  if (m.minCoeff() < 0.0) throw DomainError(std::string(what) + ": negative entry");
  if (std::abs(m.sum() - 1.0) > kProbTol) {
    throw DomainError(std::string(what) + ": entries sum to " + std::to_string(m.sum()));
  }
}

// Entries within kProbTol of zero produced by cancellation are snapped to
// zero so that exact boundary cases (rho = ±1) construct.
Eigen::MatrixXd snap_zero(Eigen::MatrixXd m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (std::abs(m.data()[i]) <= kProbTol) m.data()[i] = 0.0;
  }
  return m;
}

}  // namespace

Marginal::Marginal(Eigen::VectorXd probs) : probs_(std::move(probs)) {
  if (probs_.size() == 0) throw ShapeError("Marginal: empty");
  check_distribution(probs_, "Marginal");
}

JointDist2::JointDist2(Eigen::MatrixXd entries, Symmetry symmetry) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw ShapeError("JointDist2: matrix must be square and nonempty");
  }
  check_distribution(entries_, "JointDist2");
  symmetric_ = entries_ == entries_.transpose();
  if (symmetry == Symmetry::Required && !symmetric_) {
    throw DomainError("JointDist2: symmetry required but entries != transpose");
  }
}

JointDist2 JointDist2::transposed() const {
  return JointDist2(entries_.transpose(), symmetric_ ? Symmetry::Required : Symmetry::Unchecked);
}

JointDist2 JointDist2::uniform(std::size_t k) {
  const auto n = static_cast<Eigen::Index>(k);
  return JointDist2(Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(k * k)),
                    Symmetry::Required);
}

CondDist::CondDist(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.size() == 0) throw ShapeError("CondDist: empty");
  if (!entries_.allFinite()) throw DomainError("CondDist: non-finite entry");
  if (entries_.minCoeff() < 0.0) throw DomainError("CondDist: negative entry");
  for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
    if (std::abs(entries_.col(j).sum() - 1.0) > kProbTol) {
      throw DomainError("CondDist: column " + std::to_string(j) + " does not sum to one");
    }
  }
}

bool CondDist::deterministic() const {
  return (entries_.array() == 0.0 || entries_.array() == 1.0).all();
}

CondDist CondDist::identity(std::size_t k) {
  const auto n = static_cast<Eigen::Index>(k);
  return CondDist(Eigen::MatrixXd::Identity(n, n));
}

std::pair<Marginal, Marginal> marginals(const JointDist2& joint) {
  const Eigen::MatrixXd& p = joint.entries();
  return {Marginal(p.rowwise().sum()), Marginal(p.colwise().sum().transpose())};
}

double expectation(const Eigen::MatrixXd& values, const JointDist2& joint) {
  const Eigen::MatrixXd& p = joint.entries();
  if (values.rows() != p.rows() || values.cols() != p.cols()) {
    throw ShapeError("expectation: value matrix shape differs from distribution");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) total += values(i, j) * p(i, j);
  }
  return total;
}

JointDist2 compose_conditionals(const CondDist& y_given_yt, const JointDist2& xt_yt,
                                const CondDist& x_given_xt) {
  if (y_given_yt.inputs() != xt_yt.size() || x_given_xt.inputs() != xt_yt.size()) {
    throw ShapeError("compose_conditionals: conditional inputs do not match the joint");
  }
  if (y_given_yt.outputs() != x_given_xt.outputs()) {
    throw ShapeError("compose_conditionals: result would not be square");
  }
  Eigen::MatrixXd out =
      y_given_yt.entries() * xt_yt.entries().transpose() * x_given_xt.entries().transpose();
  return JointDist2(std::move(out));
}

bool is_independent(const JointDist2& joint, double tol) {
  auto [px, py] = marginals(joint);
  const Eigen::MatrixXd outer = px.probs() * py.probs().transpose();
  return (joint.entries() - outer).cwiseAbs().maxCoeff() <= tol;
}

JointDist2 correlation_form(const Marginal& px, const Marginal& py, double rho) {
  if (px.size() != 2 || py.size() != 2) throw ShapeError("correlation_form: marginals must be binary");
  if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("correlation_form: rho outside [-1,1]");
  const double var_x = px[0] * px[1];
  const double var_y = py[0] * py[1];
  Eigen::Matrix2d sign;
  sign << 1.0, -1.0, -1.0, 1.0;
  Eigen::MatrixXd out = px.probs() * py.probs().transpose() + rho * std::sqrt(var_x * var_y) * sign;
  out = snap_zero(std::move(out));
  if (out.minCoeff() < 0.0 || out.maxCoeff() > 1.0) {
    throw DomainError("correlation_form: (p_x, p_y, rho) yields an entry outside [0,1]");
  }
  return JointDist2(std::move(out));
}

double correlation(const JointDist2& joint) {
  if (joint.size() != 2) throw ShapeError("correlation: joint must be 2x2");
  auto [px, py] = marginals(joint);
  const double denom = std::sqrt(px[0] * px[1] * py[0] * py[1]);
  if (denom == 0.0) throw DomainError("correlation: degenerate marginal");
  return (joint(0, 0) - px[0] * py[0]) / denom;
}

JointDist2 signal_dist(SignalParams params) {
  const double b = params.b;
  const double g = params.g;
  if (!(b >= 0.0 && b <= 1.0 && g >= 0.0 && g <= 1.0)) {
    throw DomainError("signal_dist: b and g must lie in [0,1]");
  }
  if (b < g) throw DomainError("signal_dist: positivity violated (b < g)");
  const double off = (1.0 - b) / 2.0;
  Eigen::MatrixXd p(2, 2);
  p << b - g, off, off, g;
  return JointDist2(std::move(p), Symmetry::Required);
}

double mutual_information(const JointDist2& joint) {
  auto [px, py] = marginals(joint);
  double bits = 0.0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    for (std::size_t j = 0; j < joint.size(); ++j) {
      const double pij = joint(i, j);
      if (pij > 0.0) bits += pij * std::log2(pij / (px[i] * py[j]));
    }
  }
  // Rounding can leave a tiny negative total for independent joints.
  return bits < 0.0 ? 0.0 : bits;
}

JointDist2 env_from_partitions(const CondDist& o_given_s, const CondDist& op_given_s,
                               const Marginal& p_s, ObservationModel model) {
  if (o_given_s.inputs() != p_s.size() || op_given_s.inputs() != p_s.size()) {
    throw ShapeError("env_from_partitions: observation matrices do not match |S|");
  }
  if (o_given_s.outputs() != op_given_s.outputs()) {
    throw ShapeError("env_from_partitions: observation spaces differ in size");
  }
  if (model == ObservationModel::Partition &&
      !(o_given_s.deterministic() && op_given_s.deterministic())) {
    throw DomainError("env_from_partitions: observation matrices are not partitions");
  }
  Eigen::MatrixXd out =
      o_given_s.entries() * p_s.probs().asDiagonal() * op_given_s.entries().transpose();
  return JointDist2(std::move(out));
}

}  // namespace normdyn::prob
