#include "normdyn/replicator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "normdyn/errors.hpp"
#include "normdyn/kernels.hpp"
#include "normdyn/parallel.hpp"
#include "normdyn/rng.hpp"

namespace normdyn::replicator {

SimplexState::SimplexState(Eigen::VectorXd x) : x_(std::move(x)) {
  if (x_.size() == 0) throw ShapeError("SimplexState: empty");
  if (!x_.allFinite()) throw DomainError("SimplexState: non-finite component");
  if (x_.minCoeff() < 0.0) throw DomainError("SimplexState: negative component");
  if (std::abs(x_.sum() - 1.0) > kSimplexTol) throw DomainError("SimplexState: does not sum to one");
}

SimplexState SimplexState::vertex(std::size_t n, std::size_t i) {
  if (i >= n) throw DomainError("SimplexState::vertex: index out of range");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  x(static_cast<Eigen::Index>(i)) = 1.0;
  return SimplexState(std::move(x));
}

SimplexState SimplexState::barycenter(std::size_t n) {
  return SimplexState(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

namespace {

void check_square(const Eigen::MatrixXd& gamma, Eigen::Index n, const char* what) {
  if (gamma.rows() != n || gamma.cols() != n) {
    throw ShapeError(std::string(what) + ": gamma is not N x N for the state dimension");
  }
}

std::vector<double> row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
  }
  return out;
}

// Lockstep RK4 over m states stored structure-of-arrays (component i of
// state k at i*m + k). A single trajectory is the m = 1 case, which keeps
// the single and batched paths arithmetically identical.
class LockstepRk4 {
 public:
  LockstepRk4(const Eigen::MatrixXd& gamma, std::size_t m, Variant variant)
      : n_(static_cast<std::size_t>(gamma.rows())),
        m_(m),
        gamma_(row_major(gamma)),
        variant_(variant),
        isa_(kernels::active_isa()),
        k1_(n_ * m), k2_(n_ * m), k3_(n_ * m), k4_(n_ * m), tmp_(n_ * m), f_(n_) {}

  void eval(const std::vector<double>& x, std::vector<double>& out) {
    if (variant_.kind == Variant::Kind::Linear) {
      kernels::replicator_flow_batch(gamma_, n_, x, out, m_, isa_);
      return;
    }
    const double beta = variant_.beta;
    for (std::size_t k = 0; k < m_; ++k) {
      for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n_; ++j) acc = acc + gamma_[i * n_ + j] * x[j * m_ + k];
        f_[i] = acc;
      }
      double mean = 0.0;
      for (std::size_t i = 0; i < n_; ++i) mean = mean + x[i * m_ + k] * f_[i];
      double drift = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        f_[i] = std::tanh(beta * (f_[i] - mean));
        drift = drift + x[i * m_ + k] * f_[i];
      }
      for (std::size_t i = 0; i < n_; ++i) {
        out[i * m_ + k] = x[i * m_ + k] * f_[i] - x[i * m_ + k] * drift;
      }
    }
  }

  void step(std::vector<double>& x, double dt) {
    const double half = 0.5 * dt;
    const double sixth = dt / 6.0;
    const std::size_t size = x.size();
    eval(x, k1_);
    for (std::size_t e = 0; e < size; ++e) tmp_[e] = x[e] + half * k1_[e];
    eval(tmp_, k2_);
    for (std::size_t e = 0; e < size; ++e) tmp_[e] = x[e] + half * k2_[e];
    eval(tmp_, k3_);
    for (std::size_t e = 0; e < size; ++e) tmp_[e] = x[e] + dt * k3_[e];
    eval(tmp_, k4_);
    for (std::size_t e = 0; e < size; ++e) {
      x[e] = x[e] + sixth * (k1_[e] + 2.0 * k2_[e] + 2.0 * k3_[e] + k4_[e]);
    }
    for (std::size_t k = 0; k < m_; ++k) project(x, k);
  }

 private:
  void project(std::vector<double>& x, std::size_t k) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double& v = x[i * m_ + k];
      if (v < -kClipTol || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "integrate: component " << i << " left the simplex (value " << v << ")";
        throw RuntimeError(msg.str());
      }
      if (v < 0.0) v = 0.0;
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTol) {
      std::ostringstream msg;
      msg << "integrate: state sum drifted to " << sum;
      throw RuntimeError(msg.str());
    }
    for (std::size_t i = 0; i < n_; ++i) x[i * m_ + k] /= sum;
  }

  std::size_t n_;
  std::size_t m_;
  std::vector<double> gamma_;
  Variant variant_;
  kernels::Isa isa_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_, f_;
};

std::size_t step_count(const IntegrateOptions& o) {
  if (!(o.dt > 0.0)) throw DomainError("integrate: dt must be positive");
  if (!(o.t_end >= 0.0)) throw DomainError("integrate: t_end must be nonnegative");
  if (o.variant.kind == Variant::Kind::Tanh && !(o.variant.beta > 0.0)) {
    throw DomainError("integrate: tanh variant requires beta > 0");
  }
  return static_cast<std::size_t>(std::llround(o.t_end / o.dt));
}

}  // namespace

Eigen::VectorXd flow(const Eigen::VectorXd& x, const Eigen::MatrixXd& gamma) {
  check_square(gamma, x.size(), "flow");
  const std::vector<double> g = row_major(gamma);
  const std::vector<double> xs(x.data(), x.data() + x.size());
  std::vector<double> out(xs.size());
  kernels::replicator_flow_batch(g, xs.size(), xs, out, 1);
  return Eigen::Map<Eigen::VectorXd>(out.data(), x.size());
}

Eigen::VectorXd tanh_flow(const Eigen::VectorXd& x, const Eigen::MatrixXd& gamma, double beta) {
  check_square(gamma, x.size(), "tanh_flow");
  if (!(beta > 0.0)) throw DomainError("tanh_flow: beta must be positive");
  const Eigen::VectorXd f = gamma * x;
  const double mean = x.dot(f);
  const Eigen::VectorXd t = (beta * (f.array() - mean)).tanh().matrix();
  const double drift = x.dot(t);
  return (x.array() * t.array() - x.array() * drift).matrix();
}

std::string Trajectory::terminal_label() const {
  return terminal_vertex ? "vertex:" + std::to_string(*terminal_vertex) : "mixed";
}

std::optional<std::size_t> vertex_label(const Eigen::VectorXd& x, double vertex_tol) {
  Eigen::Index i = 0;
  if (x.maxCoeff(&i) > 1.0 - vertex_tol) return static_cast<std::size_t>(i);
  return std::nullopt;
}

Trajectory integrate(const SimplexState& x0, const Eigen::MatrixXd& gamma,
                     const IntegrateOptions& options) {
  check_square(gamma, static_cast<Eigen::Index>(x0.size()), "integrate");
  const std::size_t steps = step_count(options);
  LockstepRk4 rk(gamma, 1, options.variant);
  std::vector<double> x(x0.x().data(), x0.x().data() + x0.size());
  auto as_state = [&] { return SimplexState(Eigen::Map<Eigen::VectorXd>(x.data(), x0.x().size())); };

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  for (std::size_t s = 1; s <= steps; ++s) {
    rk.step(x, options.dt);
    const bool last = s == steps;
    const bool record = options.record_every != 0 && s % options.record_every == 0;
    if (record || last) {
      traj.times.push_back(static_cast<double>(s) * options.dt);
      traj.states.push_back(as_state());
    }
  }
  traj.terminal_vertex = vertex_label(traj.states.back().x(), options.vertex_tol);
  return traj;
}

std::vector<SimplexState> integrate_terminal_batch(const std::vector<SimplexState>& starts,
                                                   const Eigen::MatrixXd& gamma,
                                                   const IntegrateOptions& options) {
  if (starts.empty()) return {};
  const std::size_t n = starts.front().size();
  const std::size_t m = starts.size();
  check_square(gamma, static_cast<Eigen::Index>(n), "integrate_terminal_batch");
  const std::size_t steps = step_count(options);
  std::vector<double> x(n * m);
  for (std::size_t k = 0; k < m; ++k) {
    if (starts[k].size() != n) throw ShapeError("integrate_terminal_batch: mixed dimensions");
    for (std::size_t i = 0; i < n; ++i) x[i * m + k] = starts[k][i];
  }
  LockstepRk4 rk(gamma, m, options.variant);
  for (std::size_t s = 0; s < steps; ++s) rk.step(x, options.dt);
  std::vector<SimplexState> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = x[i * m + k];
    out.emplace_back(std::move(v));
  }
  return out;
}

double fixed_point_residual(const Eigen::VectorXd& x, const Eigen::MatrixXd& gamma) {
  check_square(gamma, x.size(), "fixed_point_residual");
  const Eigen::VectorXd f = gamma * x;
  const double mean = x.dot(f);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) > 0.0) worst = std::max(worst, std::abs(f(i) - mean));
  }
  return worst;
}

Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, const Eigen::MatrixXd& gamma) {
  check_square(gamma, x.size(), "jacobian");
  const Eigen::VectorXd f = gamma * x;
  const double mean = x.dot(f);
  const Eigen::MatrixXd xxt = x * x.transpose();
  Eigen::MatrixXd j = (f.array() - mean).matrix().asDiagonal();
  j += (Eigen::MatrixXd(x.asDiagonal()) - xxt) * gamma;
  j -= xxt * gamma.transpose();
  return j;
}

Eigen::MatrixXd jacobian_at_vertex(std::size_t n, const Eigen::MatrixXd& gamma) {
  check_square(gamma, gamma.rows(), "jacobian_at_vertex");
  const auto idx = static_cast<Eigen::Index>(n);
  if (idx >= gamma.rows()) throw DomainError("jacobian_at_vertex: vertex index out of range");
  const Eigen::VectorXd col = gamma.col(idx);
  Eigen::MatrixXd j = (col.array() - gamma(idx, idx)).matrix().asDiagonal();
  j.row(idx) -= col.transpose();
  return j;
}

Spectrum Spectrum::from(std::vector<std::complex<double>> eigenvalues) {
  Spectrum s;
  s.eigenvalues = std::move(eigenvalues);
  s.lambda_max_real = -std::numeric_limits<double>::infinity();
  for (const auto& l : s.eigenvalues) s.lambda_max_real = std::max(s.lambda_max_real, l.real());
  return s;
}

Spectrum vertex_spectrum(std::size_t n, const Eigen::MatrixXd& gamma) {
  check_square(gamma, gamma.rows(), "vertex_spectrum");
  const auto idx = static_cast<Eigen::Index>(n);
  if (idx >= gamma.rows()) throw DomainError("vertex_spectrum: vertex index out of range");
  std::vector<std::complex<double>> ev;
  for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
    if (i != idx) ev.emplace_back(gamma(i, idx) - gamma(idx, idx), 0.0);
  }
  ev.emplace_back(-gamma(idx, idx), 0.0);
  return Spectrum::from(std::move(ev));
}

Spectrum vertex_spectrum_numeric(std::size_t n, const Eigen::MatrixXd& gamma) {
  return Spectrum::from(eigenvalues(jacobian_at_vertex(n, gamma)));
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ShapeError("eigenvalues: matrix must be square");
  if (static_cast<std::size_t>(m.rows()) > kMaxEigenDim) {
    throw ShapeError("eigenvalues: dimension exceeds 64");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) throw RuntimeError("eigenvalues: QR iteration did not converge");
  const Eigen::VectorXcd values = solver.eigenvalues();
  const Eigen::MatrixXcd vectors = solver.eigenvectors();
  const Eigen::MatrixXcd mc = m.cast<std::complex<double>>();
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const Eigen::VectorXcd v = vectors.col(i).normalized();
    const double residual = (mc * v - values(i) * v).norm();
    if (residual > kEigenResidualTol) {
      std::ostringstream msg;
      msg << "eigenvalues: residual " << residual << " for eigenvalue " << values(i);
      throw RuntimeError(msg.str());
    }
    out.push_back(values(i));
  }
  return out;
}

double spectrum_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  std::vector<bool> used(b.size(), false);
  for (const auto& x : a) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && std::abs(x - b[j]) < best_d) {
        best_d = std::abs(x - b[j]);
        best = j;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Neutral: return "neutral";
    case Stability::Unstable: return "unstable";
  }
  return "unknown";
}

Stability classify_stability(const Spectrum& s, double tol) {
  if (s.lambda_max_real > tol) return Stability::Unstable;
  if (std::abs(s.lambda_max_real) <= tol) return Stability::Neutral;
  return Stability::Stable;
}

double BasinTable::share(const std::string& label) const {
  if (labels.empty()) return 0.0;
  const auto it = counts.find(label);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(labels.size());
}

SimplexState uniform_simplex_sample(std::size_t n, std::uint64_t seed, std::size_t index) {
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(index)}));
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.exponential();
  x /= x.sum();
  return SimplexState(std::move(x));
}

BasinTable basin_sample(const Eigen::MatrixXd& gamma, std::size_t n_samples, std::uint64_t seed,
                        const IntegrateOptions& options) {
  if (n_samples == 0) throw DomainError("basin_sample: n_samples must be >= 1");
  const auto n = static_cast<std::size_t>(gamma.rows());
  check_square(gamma, gamma.rows(), "basin_sample");
  std::vector<std::string> labels(n_samples);
  parallel_chunks(n_samples, [&](std::size_t begin, std::size_t end) {
    std::vector<SimplexState> starts;
    for (std::size_t i = begin; i < end; ++i) starts.push_back(uniform_simplex_sample(n, seed, i));
    const auto finals = integrate_terminal_batch(starts, gamma, options);
    for (std::size_t i = begin; i < end; ++i) {
      const auto v = vertex_label(finals[i - begin].x(), options.vertex_tol);
      labels[i] = v ? "vertex:" + std::to_string(*v) : "mixed";
    }
  });
  BasinTable table;
  table.labels = std::move(labels);
  for (const auto& l : table.labels) ++table.counts[l];
  return table;
}

}  // namespace normdyn::replicator
