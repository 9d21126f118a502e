#include "normdyn/games.hpp"

#include <cmath>

#include "normdyn/errors.hpp"

namespace normdyn::games {

RewardMatrix::RewardMatrix(double B, double S, double T, double P) {
  m_ << B, S, T, P;
  if (!m_.allFinite()) throw DomainError("RewardMatrix: non-finite entry");
}

RewardMatrix::RewardMatrix(const Eigen::Matrix2d& entries) : m_(entries) {
  if (!m_.allFinite()) throw DomainError("RewardMatrix: non-finite entry");
}

RewardMatrix RewardMatrix::affine(double alpha, double beta) const {
  return RewardMatrix(Eigen::Matrix2d((alpha * m_).array() + beta));
}

std::string_view to_string(DilemmaClass c) {
  switch (c) {
    case DilemmaClass::NoDilemma: return "no-dilemma";
    case DilemmaClass::Chicken: return "chicken";
    case DilemmaClass::StagHunt: return "stag-hunt";
    case DilemmaClass::PrisonersDilemma: return "prisoners-dilemma";
    case DilemmaClass::NotASocialDilemma: return "not-a-social-dilemma";
  }
  return "unknown";
}

DilemmaFlags check_dilemma_conditions(const RewardMatrix& r) {
  return {.c1 = r.B() > r.P(),
          .c2 = r.B() > r.S(),
          .c3 = 2.0 * r.B() > r.T() + r.S(),
          .greed = r.T() > r.B(),
          .fear = r.P() > r.S()};
}

bool has_ordering_tie(const RewardMatrix& r) {
  return r.B() == r.P() || r.B() == r.S() || 2.0 * r.B() == r.T() + r.S() || r.T() == r.B() ||
         r.P() == r.S();
}

DilemmaClass classify_dilemma(const RewardMatrix& r) {
  if (has_ordering_tie(r)) return DilemmaClass::NotASocialDilemma;
  const DilemmaFlags f = check_dilemma_conditions(r);
  if (!(f.c1 && f.c2 && f.c3)) return DilemmaClass::NotASocialDilemma;
  if (f.greed && f.fear) return DilemmaClass::PrisonersDilemma;
  if (f.greed) return DilemmaClass::Chicken;
  if (f.fear) return DilemmaClass::StagHunt;
  return DilemmaClass::NoDilemma;
}

bool chicken_violates_condition3(double B, double L) { return L >= B - 1.0; }

RewardMatrix chicken_reward(double B, double L, std::vector<std::string>* warnings) {
  if (!(B > 1.0)) throw DomainError("chicken_reward: requires B > 1");
  if (!(L > 0.0)) throw DomainError("chicken_reward: requires L > 0");
  if (warnings != nullptr && chicken_violates_condition3(B, L)) {
    warnings->push_back("chicken_reward: L >= B - 1, social dilemma condition 3 (2B > T + S) fails");
  }
  return RewardMatrix(B, 1.0, B + L, 0.0);
}

RewardMatrix pd_reward(double B, double L) {
  if (!(L < B)) throw DomainError("pd_reward: requires L < B");
  return RewardMatrix(B, 0.0, B + L, 1.0);
}

}  // namespace normdyn::games
