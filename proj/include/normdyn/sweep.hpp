#pragma once

// Parameter sweeps over the chicken family: rationality phase diagram,
// reward of the signal-following norm relative to mixed Nash, vertex
// stability, and the mutual information of the signal distribution.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "normdyn/csv.hpp"
#include "normdyn/norms.hpp"
#include "normdyn/replicator.hpp"

namespace normdyn::sweep {

// Inclusive linspace.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 2;

  double at(std::size_t i) const;
  std::vector<double> values() const;
};

struct GridSpec {
  Axis b{0.0, 1.0, 200};
  Axis L{0.0125, 2.5, 200};
  double g = 0.0;
  double B = 3.0;

  // Throws DomainError for empty or reversed ranges or n < 2.
  void validate() const;
  std::size_t cells() const { return b.n * L.n; }
  // Cells are stored b-major: index = ib * L.n + iL.
  std::size_t index(std::size_t ib, std::size_t iL) const { return ib * L.n + iL; }
};

enum class Region {
  Valid,
  Marginal,
  RedViolated,
  GreenViolated,
  PositivityViolated,
  Condition3Violated,
};
std::string_view to_string(Region r);

struct RationalityCell {
  double b = 0.0;
  double L = 0.0;
  Region region = Region::Valid;
  norms::RationalityRegion detail;
};

// Label priority: positivity, condition 3 (L >= B - 1), red, green, then a
// marginal constraint; otherwise valid.
Region classify_cell(const norms::RationalityRegion& detail, double L, double B);

struct RationalityMap {
  GridSpec grid;
  std::vector<RationalityCell> cells;
};
RationalityMap rationality_map(const GridSpec& grid);

struct RatioCell {
  double b = 0.0;
  double L = 0.0;
  double ratio = 0.0;
  bool rational = false;  // strictly inside the rational region
  bool marginal = false;
};

// Γ_22 / ρ_Nash at one point (B = 3, g = 0).
double reward_ratio(double b, double L);

struct RatioMap {
  GridSpec grid;
  std::vector<RatioCell> cells;
};
// Requires g = 0 and B = 3 (DomainError otherwise).
RatioMap reward_ratio_map(const GridSpec& grid);

inline constexpr std::size_t kChickenVertices = 4;

struct StabilityCell {
  double b = 0.0;
  double L = 0.0;
  std::array<replicator::Spectrum, kChickenVertices> spectra;
  std::array<replicator::Stability, kChickenVertices> stability{};
};

// b values where λ_max of a vertex changes sign along one L column, linearly
// interpolated between neighbouring grid points.
struct Transition {
  std::size_t vertex = 0;
  double L = 0.0;
  double b = 0.0;
};

struct StabilityMap {
  GridSpec grid;
  std::vector<StabilityCell> cells;
  std::vector<Transition> transitions;
};
// Requires g = 0 and B = 3.
StabilityMap stability_map(const GridSpec& grid);

struct MiCell {
  double b = 0.0;
  double g = 0.0;
  double mi = 0.0;  // NaN where b < g
  bool defined = false;
};

struct MiMap {
  Axis b;
  Axis g;
  std::vector<MiCell> cells;  // b-major
};
MiMap mi_map(const Axis& b, const Axis& g);

// Long-format tables: b, L (or g), quantity, value, label.
io::CsvTable to_table(const RationalityMap& m);
io::CsvTable to_table(const RatioMap& m);
io::CsvTable to_table(const StabilityMap& m);
io::CsvTable to_table(const MiMap& m);

// One row per (cell, vertex): b, L, vertex, re_1, im_1, ..., lambda_max, class.
io::CsvTable spectra_table(const StabilityMap& m);

}  // namespace normdyn::sweep
