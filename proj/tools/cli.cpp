#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "normdyn/abm.hpp"
#include "normdyn/csv.hpp"
#include "normdyn/errors.hpp"
#include "normdyn/games.hpp"
#include "normdyn/kernels.hpp"
#include "normdyn/norms.hpp"
#include "normdyn/partisan.hpp"
#include "normdyn/payoff.hpp"
#include "normdyn/probkit.hpp"
#include "normdyn/replicator.hpp"
#include "normdyn/sweep.hpp"

#ifndef NORMDYN_VERSION
#define NORMDYN_VERSION "0.0.0"
#endif

namespace normdyn::cli {

namespace fs = std::filesystem;
using io::format_double;

namespace {

struct Params {
  double B = 3.0;
  double L = 0.5;
  double b = 0.4;
  double g = 0.0;
  double beta = 1.0;
  double dt = 0.01;
  double t_end = 500.0;
  double vertex_tol = 1e-2;
  double mu = 1.0;
  std::size_t N = 1000;
  std::size_t grid = 200;
  std::size_t samples = 30;
  std::size_t rounds = 500;
  std::size_t record_every = 10;
  std::size_t D = 8;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string variant = "linear";
  std::string start;
  std::string types = "default,10,01,11";
  std::string mix;
  std::string prior = "non-overlapping";
  bool no_imitation = false;
};

// Files written by the current command; removed again if the command fails.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void prepare() {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw RuntimeError("cannot create output directory: " + dir_.string());
  }

  void csv(const std::string& name, const io::CsvTable& table) {
    const fs::path p = dir_ / name;
    io::write_csv_file(p, table);
    written_.push_back(p);
  }

  void text(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    fs::path tmp = p;
    tmp += ".partial";
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      if (!f) throw RuntimeError("cannot open for writing: " + tmp.string());
      f << content;
      f.flush();
      if (!f) throw RuntimeError("write failed: " + p.string());
    }
    std::error_code ec;
    fs::rename(tmp, p, ec);
    if (ec) throw RuntimeError("cannot move output into place: " + p.string());
    written_.push_back(p);
  }

  void rollback() noexcept {
    for (const auto& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    written_.clear();
  }

  const std::vector<fs::path>& written() const { return written_; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

Eigen::VectorXd parse_vector(const std::string& s) {
  const auto parts = split(s, ',');
  Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v(static_cast<Eigen::Index>(i)) = io::parse_double(parts[i]);
  return v;
}

std::string bool_text(bool v) { return v ? "1" : "0"; }

// ----- classify ------------------------------------------------------------

void cmd_classify(const Params& p, Outputs& outs, std::ostream& out) {
  std::vector<std::string> warnings;
  const auto r = games::chicken_reward(p.B, p.L, &warnings);
  const auto J = prob::signal_dist({p.b, p.g});
  const auto nash = norms::mixed_nash_chicken(p.B, p.L);
  const auto norm_list = norms::enumerate_norms(2, 2);
  const auto gamma = payoff::build_gamma(payoff::norm_strategies(norm_list, nash), J, r, nash);
  const auto classes = norms::classify_all(norm_list, J, r, gamma);

  io::CsvTable t;
  t.header = {"id", "prescription", "description", "rational", "null", "empirically_validatable",
              "consistent", "inconsistent", "evolutionarily_stable", "best_response"};
  std::size_t counts[7] = {};
  for (std::size_t i = 0; i < norm_list.size(); ++i) {
    const auto& c = classes[i];
    const bool flags[7] = {c.rational, c.null, c.empirically_validatable, c.consistent,
                           c.inconsistent, c.evolutionarily_stable, c.best_response};
    std::vector<std::string> row{std::to_string(norm_list[i].id), norm_list[i].prescription.bits(),
                                 norm_list[i].description.bits()};
    for (int k = 0; k < 7; ++k) {
      row.push_back(bool_text(flags[k]));
      counts[k] += flags[k];
    }
    t.add_row(std::move(row));
  }
  outs.csv("classify.csv", t);
  for (const auto& w : warnings) out << "warning: " << w << '\n';
  out << "norms " << norm_list.size() << '\n';
  for (int k = 0; k < 7; ++k) out << t.header[static_cast<std::size_t>(k) + 3] << ' ' << counts[k] << '\n';
}

// ----- gamma ---------------------------------------------------------------

void cmd_gamma(const Params& p, Outputs& outs, std::ostream& out) {
  const auto r = games::chicken_reward(p.B, p.L);
  const auto J = prob::signal_dist({p.b, p.g});
  const auto nash = norms::mixed_nash_chicken(p.B, p.L);
  const auto numeric = payoff::build_gamma(payoff::chicken_strategies(nash), J, r, nash);
  outs.csv("gamma.csv", io::labelled_matrix_table(numeric.entries(), numeric.labels()));
  io::CsvTable reward;
  reward.header = {"B", "S", "T", "P"};
  reward.add_row({format_double(r.B()), format_double(r.S()), format_double(r.T()), format_double(r.P())});
  outs.csv("reward.csv", reward);

  const Eigen::MatrixXd& g = numeric.entries();
  bool column0_constant = true;
  for (Eigen::Index i = 1; i < g.rows(); ++i) column0_constant = column0_constant && std::abs(g(i, 0) - g(0, 0)) <= 1e-12;
  out << "column0_constant " << (column0_constant ? "true" : "false") << '\n';
  out << "gamma22_over_rho " << format_double(g(2, 2) / nash.rho) << '\n';
  if (p.B == 3.0 && p.g == 0.0) {
    const auto closed = payoff::chicken_gamma_closed_form(p.b, p.L);
    outs.csv("gamma_closed_form.csv", io::labelled_matrix_table(closed.entries(), closed.labels()));
    out << "max_deviation " << format_double((g - closed.entries()).cwiseAbs().maxCoeff()) << '\n';
  } else {
    out << "max_deviation n/a (closed form needs B=3, g=0)\n";
  }
}

// ----- simulate ------------------------------------------------------------

replicator::IntegrateOptions integrate_options(const Params& p) {
  if (!(p.dt > 0.0) || !(p.t_end > 0.0)) throw DomainError("dt and t-end must be positive");
  replicator::IntegrateOptions opt;
  opt.dt = p.dt;
  opt.t_end = p.t_end;
  opt.vertex_tol = p.vertex_tol;
  opt.record_every = p.record_every;
  if (p.variant == "tanh") {
    opt.variant = replicator::Variant::tanh(p.beta);
  } else if (p.variant != "linear") {
    throw DomainError("variant must be 'linear' or 'tanh'");
  }
  return opt;
}

io::CsvTable spectra_rows(const Params& p, const Eigen::MatrixXd& gamma) {
  const std::size_t n = static_cast<std::size_t>(gamma.rows());
  io::CsvTable t;
  t.header = {"b", "L", "vertex"};
  for (std::size_t i = 1; i <= n; ++i) {
    t.header.push_back("re_" + std::to_string(i));
    t.header.push_back("im_" + std::to_string(i));
  }
  t.header.push_back("lambda_max");
  t.header.push_back("class");
  for (std::size_t v = 0; v < n; ++v) {
    const auto s = replicator::vertex_spectrum(v, gamma);
    std::vector<std::string> row{format_double(p.b), format_double(p.L), std::to_string(v)};
    for (const auto& ev : s.eigenvalues) {
      row.push_back(format_double(ev.real()));
      row.push_back(format_double(ev.imag()));
    }
    row.push_back(format_double(s.lambda_max_real));
    row.push_back(std::string(replicator::to_string(replicator::classify_stability(s))));
    t.add_row(std::move(row));
  }
  return t;
}

void cmd_simulate(const Params& p, Outputs& outs, std::ostream& out) {
  const auto r = games::chicken_reward(p.B, p.L);
  const auto J = prob::signal_dist({p.b, p.g});
  const auto nash = norms::mixed_nash_chicken(p.B, p.L);
  const auto gamma = payoff::build_gamma(payoff::chicken_strategies(nash), J, r, nash);
  const auto opt = integrate_options(p);
  if (p.samples == 0) throw DomainError("samples must be at least 1");
  const std::size_t n = gamma.size();

  const auto x0 = p.start.empty() ? replicator::SimplexState::barycenter(n)
                                  : replicator::SimplexState(parse_vector(p.start));
  if (x0.size() != n) throw DomainError("start must have one component per strategy");
  const auto traj = replicator::integrate(x0, gamma.entries(), opt);
  io::CsvTable tt;
  tt.header = {"t"};
  for (std::size_t i = 0; i < n; ++i) tt.header.push_back("x_" + std::to_string(i));
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    std::vector<std::string> row{format_double(traj.times[k])};
    for (std::size_t i = 0; i < n; ++i) row.push_back(format_double(traj.states[k][i]));
    tt.add_row(std::move(row));
  }

  const auto basin = replicator::basin_sample(gamma.entries(), p.samples, p.seed, opt);
  io::CsvTable bt;
  bt.header = {"sample", "label"};
  for (std::size_t i = 0; i < n; ++i) bt.header.push_back("start_" + std::to_string(i));
  for (std::size_t s = 0; s < basin.samples(); ++s) {
    const auto start = replicator::uniform_simplex_sample(n, p.seed, s);
    std::vector<std::string> row{std::to_string(s), basin.labels[s]};
    for (std::size_t i = 0; i < n; ++i) row.push_back(format_double(start[i]));
    bt.add_row(std::move(row));
  }

  outs.csv("gamma.csv", io::labelled_matrix_table(gamma.entries(), gamma.labels()));
  outs.csv("trajectory.csv", tt);
  outs.csv("basin.csv", bt);
  outs.csv("spectra.csv", spectra_rows(p, gamma.entries()));
  out << "trajectory_terminal " << traj.terminal_label() << '\n';
  for (const auto& [label, count] : basin.counts) {
    out << "basin " << label << ' ' << count << '/' << basin.samples() << '\n';
  }
}

// ----- sweep ---------------------------------------------------------------

void cmd_sweep(const Params& p, Outputs& outs, std::ostream& out) {
  sweep::GridSpec grid;
  grid.b.n = p.grid;
  grid.L.n = p.grid;
  grid.L.lo = grid.L.hi / static_cast<double>(p.grid == 0 ? 1 : p.grid);
  grid.g = p.g;
  grid.B = p.B;
  grid.validate();
  const auto rat = sweep::rationality_map(grid);
  const auto ratio = sweep::reward_ratio_map(grid);
  const auto stab = sweep::stability_map(grid);
  const auto mi = sweep::mi_map(grid.b, sweep::Axis{0.0, 1.0, p.grid});
  outs.csv("rationality.csv", sweep::to_table(rat));
  outs.csv("reward_ratio.csv", sweep::to_table(ratio));
  outs.csv("stability.csv", sweep::to_table(stab));
  outs.csv("mi.csv", sweep::to_table(mi));
  outs.csv("spectra.csv", sweep::spectra_table(stab));
  out << "cells " << grid.cells() << '\n';
  out << "vertex2_transitions " << std::count_if(stab.transitions.begin(), stab.transitions.end(),
                                                  [](const auto& t) { return t.vertex == 2; })
      << '\n';
}

// ----- abm -----------------------------------------------------------------

void cmd_abm(const Params& p, Outputs& outs, std::ostream& out) {
  abm::Config c;
  c.N = p.N;
  c.rounds = p.rounds;
  c.beta = p.beta;
  c.types = split(p.types, ',');
  if (!p.mix.empty()) c.initial_mix = parse_vector(p.mix);
  c.j0 = {p.b, p.g};
  c.B = p.B;
  c.L = p.L;
  c.seed = p.seed;
  c.imitation = !p.no_imitation;
  const auto result = abm::run(c);
  outs.csv("abm.csv", abm::to_table(result));
  const auto& last = result.rounds.back().frequencies;
  for (std::size_t i = 0; i < result.types.size(); ++i) {
    out << "final_frequency " << result.types[i].label << ' ' << format_double(last(static_cast<Eigen::Index>(i)))
        << '\n';
  }
}

// ----- partisan-demo -------------------------------------------------------

void cmd_partisan(const Params& p, Outputs& outs, std::ostream& out) {
  partisan::DemoConfig c;
  c.N = p.N;
  c.D = p.D;
  c.mu = p.mu;
  c.rounds = p.rounds;
  c.B = p.B;
  c.L = p.L;
  c.j0 = {p.b, p.g};
  c.seed = p.seed;
  if (p.prior == "non-overlapping") {
    c.prior = partisan::Prior::NonOverlapping;
  } else if (p.prior == "uninformative") {
    c.prior = partisan::Prior::Uninformative;
  } else {
    throw DomainError("prior must be 'non-overlapping' or 'uninformative'");
  }
  const auto rounds = partisan::run_demo(c);
  outs.csv("partisan.csv", partisan::to_table(rounds));
  if (!rounds.empty()) {
    out << "final_in_group_stop " << format_double(rounds.back().in_group_stop) << '\n';
    out << "final_cross_group_stop " << format_double(rounds.back().cross_group_stop) << '\n';
  }
}

// ----- wiring --------------------------------------------------------------

void add_game(CLI::App* sub, Params& p) {
  sub->add_option("--B", p.B, "mutual cooperation reward")->capture_default_str();
  sub->add_option("--L", p.L, "temptation excess T - B")->capture_default_str();
  sub->add_option("--b", p.b, "coordination potential")->capture_default_str();
  sub->add_option("--g", p.g, "exploitation mass")->capture_default_str();
}

void add_out(CLI::App* sub, Params& p) {
  sub->add_option("--out", p.out, "output directory")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Social norms as correlated equilibria: classification, payoffs, dynamics"};
  app.set_version_flag("--version", NORMDYN_VERSION);
  app.set_config("--config", "", "key=value configuration file; command-line flags override it");
  app.require_subcommand(1);
  Params p;

  auto* classify = app.add_subcommand("classify", "classify all 16 binary norms");
  add_game(classify, p);
  add_out(classify, p);

  auto* gamma = app.add_subcommand("gamma", "norm payoff matrix, numeric and closed form");
  add_game(gamma, p);
  add_out(gamma, p);

  auto* simulate = app.add_subcommand("simulate", "replicator trajectory, basins and vertex spectra");
  add_game(simulate, p);
  add_out(simulate, p);
  simulate->add_option("--dt", p.dt, "RK4 step")->capture_default_str();
  simulate->add_option("--t-end", p.t_end, "integration horizon")->capture_default_str();
  simulate->add_option("--samples", p.samples, "uniform basin starts")->capture_default_str();
  simulate->add_option("--seed", p.seed, "random seed")->capture_default_str();
  simulate->add_option("--variant", p.variant, "linear or tanh")->capture_default_str();
  simulate->add_option("--beta", p.beta, "selection strength of the tanh variant")->capture_default_str();
  simulate->add_option("--start", p.start, "trajectory start, comma separated (default barycenter)");
  simulate->add_option("--record-every", p.record_every, "trajectory sampling stride")->capture_default_str();
  simulate->add_option("--vertex-tol", p.vertex_tol, "terminal vertex tolerance")->capture_default_str();

  auto* sw = app.add_subcommand("sweep", "rationality, reward ratio, stability and MI maps");
  sw->add_option("--B", p.B, "mutual cooperation reward")->capture_default_str();
  sw->add_option("--g", p.g, "exploitation mass")->capture_default_str();
  sw->add_option("--grid", p.grid, "points per axis")->capture_default_str();
  add_out(sw, p);

  auto* ab = app.add_subcommand("abm", "closed-loop agent-based simulation");
  add_game(ab, p);
  add_out(ab, p);
  ab->add_option("--N", p.N, "agents (even)")->capture_default_str();
  ab->add_option("--rounds", p.rounds, "rounds")->capture_default_str();
  ab->add_option("--beta", p.beta, "imitation selection strength (inf for deterministic)")->capture_default_str();
  ab->add_option("--seed", p.seed, "random seed")->capture_default_str();
  ab->add_option("--types", p.types, "agent types: default or action bits")->capture_default_str();
  ab->add_option("--mix", p.mix, "initial type frequencies (default uniform)");
  ab->add_flag("--no-imitation", p.no_imitation, "disable imitation");

  auto* pd = app.add_subcommand("partisan-demo", "two opinion populations with pair-type rewards");
  add_game(pd, p);
  add_out(pd, p);
  pd->add_option("--N", p.N, "agents per population")->capture_default_str();
  pd->add_option("--D", p.D, "opinion dimensions")->capture_default_str();
  pd->add_option("--mu", p.mu, "opinion mean offset")->capture_default_str();
  pd->add_option("--rounds", p.rounds, "rounds")->capture_default_str();
  pd->add_option("--seed", p.seed, "random seed")->capture_default_str();
  pd->add_option("--prior", p.prior, "non-overlapping or uninformative")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  Outputs outs(p.out);
  CLI::App* chosen = app.get_subcommands().front();
  try {
    outs.prepare();
    const std::string name = chosen->get_name();
    if (name == "classify") cmd_classify(p, outs, out);
    else if (name == "gamma") cmd_gamma(p, outs, out);
    else if (name == "simulate") cmd_simulate(p, outs, out);
    else if (name == "sweep") cmd_sweep(p, outs, out);
    else if (name == "abm") cmd_abm(p, outs, out);
    else cmd_partisan(p, outs, out);

    std::string manifest = "# normdyn " + std::string(NORMDYN_VERSION) + "\n# outputs:";
    for (const auto& f : outs.written()) manifest += " " + f.filename().string();
    manifest += '\n';
    std::istringstream all(app.config_to_str(true, false));
    const std::string prefix = name + ".";
    for (std::string line; std::getline(all, line);) {
      if (line.rfind(prefix, 0) == 0) manifest += line + '\n';
    }
    outs.text("manifest.ini", manifest);
  } catch (const std::invalid_argument& e) {
    outs.rollback();
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    outs.rollback();
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace normdyn::cli
