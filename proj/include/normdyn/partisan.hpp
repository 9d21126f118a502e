#pragma once

// Opinion similarity, pair-type inference and pair-type-dependent rewards,
// with a small two-population demonstration loop.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>

#include "normdyn/csv.hpp"
#include "normdyn/games.hpp"
#include "normdyn/norms.hpp"
#include "normdyn/probkit.hpp"

namespace normdyn::partisan {

// Deviation of an agent's beliefs from the population average.
class OpinionVector {
 public:
  // Throws DomainError for an empty or non-finite vector.
  explicit OpinionVector(Eigen::VectorXd d);

  const Eigen::VectorXd& d() const { return d_; }
  std::size_t dim() const { return static_cast<std::size_t>(d_.size()); }

 private:
  Eigen::VectorXd d_;
};

struct PairType {
  int xi = 1;  // 1: like-minded, 0: opposed
  bool estimated = false;

  friend bool operator==(const PairType&, const PairType&) = default;
};

// Step function with Θ(0) = 0.
inline double step(double x) { return x > 0.0 ? 1.0 : 0.0; }

// (1/D) Σ Θ(d_k) Θ(d'_k). Throws ShapeError on dimension mismatch.
double similarity(const OpinionVector& d, const OpinionVector& d_opp);

// ξ = Θ(S − 1/2). Throws DomainError for S outside [0, 1].
PairType infer_type(double s);

// [[B, 2ξ − 1], [B + L, 0]].
games::RewardMatrix partisan_reward(const PairType& type, double B, double L);

enum class Prior { NonOverlapping, Uninformative };

// Inference from a single observed opinion component. nullopt is undecided.
std::optional<PairType> infer_type_partial(double observed_component, double own_component,
                                           Prior prior);

// Symmetric equilibrium of a 2x2 symmetric game: a strictly dominant action
// when one exists, otherwise the mixed equilibrium. rho is its average reward.
norms::NashSolution symmetric_nash(const games::RewardMatrix& r);

struct DemoConfig {
  std::size_t N = 200;  // agents per population
  std::size_t D = 8;
  double mu = 1.0;      // opinion means are +mu and -mu per component
  std::size_t rounds = 100;
  double B = 3.0;
  double L = 0.5;
  prob::SignalParams j0{0.4, 0.0};
  Prior prior = Prior::NonOverlapping;
  std::uint64_t seed = 1;

  void validate() const;
};

struct DemoRound {
  double in_group_stop = 0.0;     // share of stop actions in same-population pairs
  double cross_group_stop = 0.0;  // share of stop actions in cross-population pairs
  double in_group_opposed = 0.0;  // share of same-population pairs typed ξ = 0
  double cross_group_opposed = 0.0;
  prob::JointDist2 like_estimate;
  prob::JointDist2 opposed_estimate;
};

// Two populations with opinions N(+mu, 1) and N(−mu, 1) per component, all
// holding the signal-following norm. Each round all 2N agents are paired at
// random; each agent sees one random opinion component of its partner and
// infers ξ̂ (undecided counts as like-minded); the pair type is the minimum of
// the two. Like-minded and opposed pairs draw signals from separate
// empirical action distributions and play conditionally on rationality.
std::vector<DemoRound> run_demo(const DemoConfig& config);

io::CsvTable to_table(const std::vector<DemoRound>& rounds);

}  // namespace normdyn::partisan
