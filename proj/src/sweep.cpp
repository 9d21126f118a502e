#include "normdyn/sweep.hpp"

#include <cmath>
#include <limits>

#include "normdyn/errors.hpp"
#include "normdyn/games.hpp"
#include "normdyn/kernels.hpp"
#include "normdyn/parallel.hpp"
#include "normdyn/payoff.hpp"
#include "normdyn/probkit.hpp"

namespace normdyn::sweep {

using io::format_double;

double Axis::at(std::size_t i) const {
  if (i + 1 == n) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

std::vector<double> Axis::values() const {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = at(i);
  return v;
}

namespace {

void validate_axis(const Axis& a, const char* name) {
  if (a.n < 2) throw DomainError(std::string("grid: ") + name + " needs at least 2 points");
  if (!(a.lo < a.hi) || !std::isfinite(a.lo) || !std::isfinite(a.hi)) {
    throw DomainError(std::string("grid: ") + name + " range must satisfy lo < hi");
  }
}

void require_canonical(const GridSpec& grid) {
  if (grid.g != 0.0 || grid.B != 3.0) {
    throw DomainError("closed-form chicken payoffs need g = 0 and B = 3");
  }
}

struct GammaBlock {
  std::size_t m = 0;
  std::vector<double> out;

  double at(std::size_t r, std::size_t c, std::size_t k) const { return out[(4 * r + c) * m + k]; }
  Eigen::MatrixXd matrix(std::size_t k) const {
    Eigen::MatrixXd g(4, 4);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c)
        g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = at(r, c, k);
    return g;
  }
};

// Closed-form Γ for grid cells [begin, end).
GammaBlock gamma_block(const GridSpec& grid, std::size_t begin, std::size_t end) {
  GammaBlock blk;
  blk.m = end - begin;
  std::vector<double> bs(blk.m);
  std::vector<double> ls(blk.m);
  for (std::size_t k = 0; k < blk.m; ++k) {
    const std::size_t idx = begin + k;
    bs[k] = grid.b.at(idx / grid.L.n);
    ls[k] = grid.L.at(idx % grid.L.n);
  }
  blk.out.resize(16 * blk.m);
  kernels::chicken_gamma_batch(bs, ls, blk.out);
  return blk;
}

}  // namespace

void GridSpec::validate() const {
  validate_axis(b, "b");
  validate_axis(L, "L");
  if (!std::isfinite(g) || !std::isfinite(B)) throw DomainError("grid: g and B must be finite");
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::Valid: return "valid";
    case Region::Marginal: return "marginal";
    case Region::RedViolated: return "red-violated";
    case Region::GreenViolated: return "green-violated";
    case Region::PositivityViolated: return "positivity-violated";
    case Region::Condition3Violated: return "condition-3-violated";
  }
  return "?";
}

Region classify_cell(const norms::RationalityRegion& d, double L, double B) {
  using norms::Bound;
  if (d.positivity == Bound::Violated) return Region::PositivityViolated;
  if (games::chicken_violates_condition3(B, L)) return Region::Condition3Violated;
  if (d.red == Bound::Violated) return Region::RedViolated;
  if (d.green == Bound::Violated) return Region::GreenViolated;
  if (d.any_marginal()) return Region::Marginal;
  return Region::Valid;
}

RationalityMap rationality_map(const GridSpec& grid) {
  grid.validate();
  RationalityMap map{grid, std::vector<RationalityCell>(grid.cells())};
  parallel_chunks(grid.cells(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& c = map.cells[i];
      c.b = grid.b.at(i / grid.L.n);
      c.L = grid.L.at(i % grid.L.n);
      c.detail = norms::rationality_region(c.b, grid.g, c.L);
      c.region = classify_cell(c.detail, c.L, grid.B);
    }
  });
  return map;
}

double reward_ratio(double b, double L) {
  const auto gamma = payoff::chicken_gamma_closed_form(b, L);
  return gamma(2, 2) / norms::mixed_nash_chicken(3.0, L).rho;
}

RatioMap reward_ratio_map(const GridSpec& grid) {
  grid.validate();
  require_canonical(grid);
  RatioMap map{grid, std::vector<RatioCell>(grid.cells())};
  parallel_chunks(grid.cells(), [&](std::size_t begin, std::size_t end) {
    const GammaBlock blk = gamma_block(grid, begin, end);
    for (std::size_t k = 0; k < blk.m; ++k) {
      auto& c = map.cells[begin + k];
      c.b = grid.b.at((begin + k) / grid.L.n);
      c.L = grid.L.at((begin + k) % grid.L.n);
      c.ratio = blk.at(2, 2, k) / norms::mixed_nash_chicken(grid.B, c.L).rho;
      const auto region = norms::rationality_region(c.b, grid.g, c.L);
      c.marginal = region.any_marginal();
      c.rational = region.green_ok() && region.red_ok() && region.positivity_ok();
    }
  });
  return map;
}

StabilityMap stability_map(const GridSpec& grid) {
  grid.validate();
  require_canonical(grid);
  StabilityMap map{grid, std::vector<StabilityCell>(grid.cells()), {}};
  parallel_chunks(grid.cells(), [&](std::size_t begin, std::size_t end) {
    const GammaBlock blk = gamma_block(grid, begin, end);
    for (std::size_t k = 0; k < blk.m; ++k) {
      auto& c = map.cells[begin + k];
      c.b = grid.b.at((begin + k) / grid.L.n);
      c.L = grid.L.at((begin + k) % grid.L.n);
      const Eigen::MatrixXd gamma = blk.matrix(k);
      for (std::size_t v = 0; v < kChickenVertices; ++v) {
        c.spectra[v] = replicator::vertex_spectrum(v, gamma);
        c.stability[v] = replicator::classify_stability(c.spectra[v]);
      }
    }
  });
  for (std::size_t v = 0; v < kChickenVertices; ++v) {
    for (std::size_t iL = 0; iL < grid.L.n; ++iL) {
      for (std::size_t ib = 0; ib + 1 < grid.b.n; ++ib) {
        const auto& lo = map.cells[grid.index(ib, iL)];
        const auto& hi = map.cells[grid.index(ib + 1, iL)];
        const double y0 = lo.spectra[v].lambda_max_real;
        const double y1 = hi.spectra[v].lambda_max_real;
        if ((y0 > 0.0) == (y1 > 0.0)) continue;
        map.transitions.push_back({v, lo.L, lo.b + (0.0 - y0) * (hi.b - lo.b) / (y1 - y0)});
      }
    }
  }
  return map;
}

MiMap mi_map(const Axis& b, const Axis& g) {
  validate_axis(b, "b");
  validate_axis(g, "g");
  MiMap map{b, g, std::vector<MiCell>(b.n * g.n)};
  parallel_chunks(map.cells.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& c = map.cells[i];
      c.b = b.at(i / g.n);
      c.g = g.at(i % g.n);
      c.defined = c.b >= c.g;
      c.mi = c.defined ? prob::mutual_information(prob::signal_dist({c.b, c.g}))
                       : std::numeric_limits<double>::quiet_NaN();
    }
  });
  return map;
}

namespace {

io::CsvTable long_table(const char* second_axis) {
  io::CsvTable t;
  t.header = {"b", second_axis, "quantity", "value", "label"};
  return t;
}

}  // namespace

io::CsvTable to_table(const RationalityMap& m) {
  auto t = long_table("L");
  for (const auto& c : m.cells) {
    t.add_row({format_double(c.b), format_double(c.L), "region", std::to_string(static_cast<int>(c.region)),
               std::string(to_string(c.region))});
  }
  return t;
}

io::CsvTable to_table(const RatioMap& m) {
  auto t = long_table("L");
  for (const auto& c : m.cells) {
    const char* label = c.marginal ? "marginal" : (c.rational ? "rational" : "outside");
    t.add_row({format_double(c.b), format_double(c.L), "gamma22_over_rho", format_double(c.ratio), label});
  }
  return t;
}

io::CsvTable to_table(const StabilityMap& m) {
  auto t = long_table("L");
  for (const auto& c : m.cells) {
    for (std::size_t v = 0; v < kChickenVertices; ++v) {
      t.add_row({format_double(c.b), format_double(c.L), "lambda_max_v" + std::to_string(v),
                 format_double(c.spectra[v].lambda_max_real), std::string(replicator::to_string(c.stability[v]))});
    }
  }
  for (const auto& tr : m.transitions) {
    t.add_row({format_double(tr.b), format_double(tr.L), "transition_v" + std::to_string(tr.vertex),
               format_double(tr.b), "transition"});
  }
  return t;
}

io::CsvTable to_table(const MiMap& m) {
  auto t = long_table("g");
  for (const auto& c : m.cells) {
    t.add_row({format_double(c.b), format_double(c.g), "mutual_information_bits", format_double(c.mi),
               c.defined ? "ok" : "undefined"});
  }
  return t;
}

io::CsvTable spectra_table(const StabilityMap& m) {
  io::CsvTable t;
  t.header = {"b", "L", "vertex"};
  for (std::size_t i = 1; i <= kChickenVertices; ++i) {
    t.header.push_back("re_" + std::to_string(i));
    t.header.push_back("im_" + std::to_string(i));
  }
  t.header.push_back("lambda_max");
  t.header.push_back("class");
  for (const auto& c : m.cells) {
    for (std::size_t v = 0; v < kChickenVertices; ++v) {
      std::vector<std::string> row{format_double(c.b), format_double(c.L), std::to_string(v)};
      for (const auto& ev : c.spectra[v].eigenvalues) {
        row.push_back(format_double(ev.real()));
        row.push_back(format_double(ev.imag()));
      }
      row.push_back(format_double(c.spectra[v].lambda_max_real));
      row.push_back(std::string(replicator::to_string(c.stability[v])));
      t.add_row(std::move(row));
    }
  }
  return t;
}

}  // namespace normdyn::sweep
