#pragma once

// Replicator dynamics on the probability simplex,
//   ẋ = diag(x) (Γx − (xᵀΓx) 1),
// with integration, fixed-point and linear stability analysis, and basin
// sampling.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace normdyn::replicator {

inline constexpr double kSimplexTol = 1e-9;
// Negative components down to this value are clipped after a step; anything
// more negative aborts the integration.
inline constexpr double kClipTol = 1e-12;

class SimplexState {
 public:
  explicit SimplexState(Eigen::VectorXd x);

  static SimplexState vertex(std::size_t n, std::size_t i);
  static SimplexState barycenter(std::size_t n);

  const Eigen::VectorXd& x() const { return x_; }
  std::size_t size() const { return static_cast<std::size_t>(x_.size()); }
  double operator[](std::size_t i) const { return x_(static_cast<Eigen::Index>(i)); }

 private:
  Eigen::VectorXd x_;
};

// Velocity for any x in R^N (the simplex constraint is not required, so the
// flow can be finite-differenced).
Eigen::VectorXd flow(const Eigen::VectorXd& x, const Eigen::MatrixXd& gamma);

// Pairwise-comparison dynamics: ẋ_n = x_n tanh(βΔf_n) − x_n Σ_m x_m tanh(βΔf_m).
Eigen::VectorXd tanh_flow(const Eigen::VectorXd& x, const Eigen::MatrixXd& gamma, double beta);

struct Variant {
  enum class Kind { Linear, Tanh };
  Kind kind = Kind::Linear;
  double beta = 1.0;  // selection strength for Kind::Tanh

  static Variant linear() { return {}; }
  static Variant tanh(double beta) { return {Kind::Tanh, beta}; }
};

struct IntegrateOptions {
  double dt = 0.01;
  double t_end = 500.0;
  Variant variant;
  // Record every k-th step; 0 records only the initial and final states.
  std::size_t record_every = 1;
  // A terminal state is labelled with vertex n when x_n > 1 - vertex_tol.
  double vertex_tol = 1e-2;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SimplexState> states;
  std::optional<std::size_t> terminal_vertex;

  // "vertex:<n>" or "mixed".
  std::string terminal_label() const;
};

std::optional<std::size_t> vertex_label(const Eigen::VectorXd& x, double vertex_tol);

// Fixed-step classical RK4. After each step components in [-kClipTol, 0) are
// set to zero and the state is renormalised; throws RuntimeError if a
// component drops below -kClipTol or the sum drifts beyond kSimplexTol.
Trajectory integrate(const SimplexState& x0, const Eigen::MatrixXd& gamma,
                     const IntegrateOptions& options = {});

// Terminal states of many trajectories integrated in lockstep (SIMD across
// trajectories for the linear variant). Bit-identical to calling integrate()
// on each start.
std::vector<SimplexState> integrate_terminal_batch(const std::vector<SimplexState>& starts,
                                                   const Eigen::MatrixXd& gamma,
                                                   const IntegrateOptions& options = {});

// max over supported n (x_n > 0) of |(Γx)_n − xᵀΓx|.
double fixed_point_residual(const Eigen::VectorXd& x, const Eigen::MatrixXd& gamma);

// diag(Γx − (xᵀΓx)1) + (diag(x) − xxᵀ)Γ − xxᵀΓᵀ.
Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, const Eigen::MatrixXd& gamma);

// Jacobian at vertex n: diag(Γ_{·n} − Γ_nn 1) − ê_n Γ_{·n}ᵀ.
Eigen::MatrixXd jacobian_at_vertex(std::size_t n, const Eigen::MatrixXd& gamma);

struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;
  double lambda_max_real = 0.0;

  static Spectrum from(std::vector<std::complex<double>> eigenvalues);
};

// Closed form: {Γ_in − Γ_nn : i ≠ n} ∪ {−Γ_nn}.
Spectrum vertex_spectrum(std::size_t n, const Eigen::MatrixXd& gamma);

// Numerical eigenvalues of jacobian_at_vertex(n, Γ).
Spectrum vertex_spectrum_numeric(std::size_t n, const Eigen::MatrixXd& gamma);

inline constexpr std::size_t kMaxEigenDim = 64;
inline constexpr double kEigenResidualTol = 1e-8;

// All eigenvalues of a real square matrix (N <= 64). Throws RuntimeError on
// non-convergence or when an eigenpair residual exceeds kEigenResidualTol.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m);

// Largest distance between two eigenvalue multisets under a greedy
// nearest-neighbour matching.
double spectrum_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b);

enum class Stability { Stable, Neutral, Unstable };
std::string_view to_string(Stability s);

inline constexpr double kStabilityTol = 1e-9;

Stability classify_stability(const Spectrum& s, double tol = kStabilityTol);

struct BasinTable {
  std::vector<std::string> labels;       // per sample, in sample order
  std::map<std::string, std::size_t> counts;

  double share(const std::string& label) const;
  std::size_t samples() const { return labels.size(); }
};

// Uniform starts on the simplex (normalised exponential variates, one stream
// per sample index), integrated to options.t_end and tallied by terminal
// label.
BasinTable basin_sample(const Eigen::MatrixXd& gamma, std::size_t n_samples, std::uint64_t seed,
                        const IntegrateOptions& options = {});

// The start used by basin_sample for a given sample index.
SimplexState uniform_simplex_sample(std::size_t n, std::uint64_t seed, std::size_t index);

}  // namespace normdyn::replicator
