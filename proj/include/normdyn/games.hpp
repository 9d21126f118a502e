#pragma once

// Two-player symmetric 2x2 reward matrices and social-dilemma classification.

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace normdyn::games {

// [[B, S], [T, P]]: row = own action (0 stop/cooperate, 1 go/exploit),
// column = opponent action.
class RewardMatrix {
 public:
  RewardMatrix(double B, double S, double T, double P);
  explicit RewardMatrix(const Eigen::Matrix2d& entries);

  double B() const { return m_(0, 0); }
  double S() const { return m_(0, 1); }
  double T() const { return m_(1, 0); }
  double P() const { return m_(1, 1); }
  const Eigen::Matrix2d& entries() const { return m_; }
  double operator()(int a, int a_opp) const { return m_(a, a_opp); }

  // alpha·R + beta.
  RewardMatrix affine(double alpha, double beta) const;

  friend bool operator==(const RewardMatrix& x, const RewardMatrix& y) { return x.m_ == y.m_; }

 private:
  Eigen::Matrix2d m_;
};

struct DilemmaFlags {
  bool c1 = false;     // B > P
  bool c2 = false;     // B > S
  bool c3 = false;     // 2B > T + S
  bool greed = false;  // T > B
  bool fear = false;   // P > S
};

enum class DilemmaClass { NoDilemma, Chicken, StagHunt, PrisonersDilemma, NotASocialDilemma };

std::string_view to_string(DilemmaClass c);

DilemmaFlags check_dilemma_conditions(const RewardMatrix& r);

// True when any of the five defining comparisons is an exact equality.
bool has_ordering_tie(const RewardMatrix& r);

// Ties are classified NotASocialDilemma; see has_ordering_tie.
DilemmaClass classify_dilemma(const RewardMatrix& r);

// Condition 3 fails for the chicken family when L >= B - 1.
bool chicken_violates_condition3(double B, double L);

// [[B, 1], [B+L, 0]]. Throws DomainError for B <= 1 or L <= 0. When L >= B-1
// a diagnostic is appended to `warnings` (if given) instead of failing.
RewardMatrix chicken_reward(double B, double L, std::vector<std::string>* warnings = nullptr);

// Prisoner's dilemma variant with the second column swapped: [[B, 0], [B+L, 1]].
// Throws DomainError for L >= B.
RewardMatrix pd_reward(double B, double L);

}  // namespace normdyn::games
