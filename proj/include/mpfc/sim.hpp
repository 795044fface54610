#ifndef MPFC_SIM_HPP
#define MPFC_SIM_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mpfc/energy.hpp"
#include "mpfc/errors.hpp"
#include "mpfc/init.hpp"
#include "mpfc/io.hpp"
#include "mpfc/step.hpp"

namespace mpfc {

enum class IcType { Benchmark, Random, Seeds, Crystal };
enum class PinMode { Off, Strip };

struct IcConfig {
  IcType type = IcType::Benchmark;
  double mean = 0.07;
  double amp = 0.07;
  std::uint64_t seed = 1;
  std::vector<double> sites;  // seed-perturbation x positions, empty = drawn
  double bump_amp = 0.10;
  double bump_radius = 2.0;
  double phi_s = 0.395;
  double phi_l = 0.57;
  int layers = 20;
};

struct PinConfig {
  PinMode mode = PinMode::Off;
  double weight = 2.0;
  double thickness = kPi;
  double shear_fraction = 0.0;
};

struct OutputConfig {
  std::string dir;        // empty = keep everything in memory
  int field_every = 0;    // snapshot cadence in steps, 0 = off
  int energy_every = 1;   // energy row cadence in steps
  bool with_hminus = true;
};

struct SimConfig {
  GridSpec grid{128, 128, 0.25, Bc::Periodic, Bc::Periodic};
  Params params{1.0, 0.025, 0.9, 0.1};
  SchemeTag scheme = SchemeTag::SecondOrder;
  double t_final = 10.0;
  MgConfig mg;
  EllipticConfig elliptic;
  IcConfig ic;
  PinConfig pin;
  OutputConfig output;

  long steps() const {
    return static_cast<long>(std::llround(t_final / params.s));
  }

  void validate() const {
    if (!(t_final > 0.0)) throw ConfigError("t_final must be positive");
    params.validate();
    mg.validate();
    if (steps() < 1)
      throw ConfigError("t_final shorter than half a time step");
    if (output.energy_every < 1)
      throw ConfigError("output.energy_every must be >= 1");
    if (output.field_every < 0)
      throw ConfigError("output.field_every must be >= 0");
  }
};

/// The standard benchmark setup: (0,32)^2 at 128^2, M = 1, epsilon = 0.025,
/// beta = 0.9, second-order scheme, benchmark initial data, t_final = 10.
inline SimConfig benchmark_config() { return SimConfig{}; }

// ---------------------------------------------------------------------------
// Config file handling: flat "key = value" lines, '#' comments.

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

inline long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
}

inline bool to_onoff(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected on/off, got '" + v + "'");
}

inline Bc to_bc(const std::string& key, const std::string& v) {
  if (v == "periodic") return Bc::Periodic;
  if (v == "neumann") return Bc::Neumann;
  throw ConfigError(key + ": expected periodic|neumann, got '" + v + "'");
}

inline std::vector<double> to_list(const std::string& key,
                                   const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

}  // namespace detail

inline void apply_config_key(SimConfig& cfg, const std::string& key,
                             const std::string& value) {
  using detail::to_bc;
  using detail::to_double;
  using detail::to_list;
  using detail::to_long;
  using detail::to_onoff;
  if (key == "grid.m")
    cfg.grid.m = static_cast<int>(to_long(key, value));
  else if (key == "grid.n")
    cfg.grid.n = static_cast<int>(to_long(key, value));
  else if (key == "grid.h")
    cfg.grid.h = to_double(key, value);
  else if (key == "bc.x")
    cfg.grid.bc_x = to_bc(key, value);
  else if (key == "bc.y")
    cfg.grid.bc_y = to_bc(key, value);
  else if (key == "params.M")
    cfg.params.M = to_double(key, value);
  else if (key == "params.epsilon")
    cfg.params.epsilon = to_double(key, value);
  else if (key == "params.beta")
    cfg.params.beta = to_double(key, value);
  else if (key == "params.s")
    cfg.params.s = to_double(key, value);
  else if (key == "scheme") {
    if (value == "first")
      cfg.scheme = SchemeTag::FirstOrder;
    else if (value == "second")
      cfg.scheme = SchemeTag::SecondOrder;
    else
      throw ConfigError("scheme: expected first|second, got '" + value + "'");
  } else if (key == "t_final")
    cfg.t_final = to_double(key, value);
  else if (key == "mg.tol")
    cfg.mg.tol = to_double(key, value);
  else if (key == "mg.max_vcycles")
    cfg.mg.max_vcycles = static_cast<int>(to_long(key, value));
  else if (key == "mg.l_max")
    cfg.mg.l_max = static_cast<int>(to_long(key, value));
  else if (key == "mg.coarsest")
    cfg.mg.coarsest = static_cast<int>(to_long(key, value));
  else if (key == "mg.coarse_passes")
    cfg.mg.coarse_passes = static_cast<int>(to_long(key, value));
  else if (key == "mg.linearization") {
    if (value == "picard")
      cfg.mg.linearization = Linearization::Picard;
    else if (value == "newton")
      cfg.mg.linearization = Linearization::Newton;
    else
      throw ConfigError("mg.linearization: expected picard|newton");
  } else if (key == "elliptic.rel_tol")
    cfg.elliptic.rel_tol = to_double(key, value);
  else if (key == "elliptic.max_iters")
    cfg.elliptic.max_iters = static_cast<int>(to_long(key, value));
  else if (key == "ic.type") {
    if (value == "benchmark")
      cfg.ic.type = IcType::Benchmark;
    else if (value == "random")
      cfg.ic.type = IcType::Random;
    else if (value == "seeds")
      cfg.ic.type = IcType::Seeds;
    else if (value == "crystal")
      cfg.ic.type = IcType::Crystal;
    else
      throw ConfigError("ic.type: expected benchmark|random|seeds|crystal");
  } else if (key == "ic.mean")
    cfg.ic.mean = to_double(key, value);
  else if (key == "ic.amp")
    cfg.ic.amp = to_double(key, value);
  else if (key == "ic.seed")
    cfg.ic.seed = static_cast<std::uint64_t>(to_long(key, value));
  else if (key == "ic.sites")
    cfg.ic.sites = to_list(key, value);
  else if (key == "ic.bump_amp")
    cfg.ic.bump_amp = to_double(key, value);
  else if (key == "ic.bump_radius")
    cfg.ic.bump_radius = to_double(key, value);
  else if (key == "ic.phi_s")
    cfg.ic.phi_s = to_double(key, value);
  else if (key == "ic.phi_l")
    cfg.ic.phi_l = to_double(key, value);
  else if (key == "ic.layers")
    cfg.ic.layers = static_cast<int>(to_long(key, value));
  else if (key == "pin.mode") {
    if (value == "off")
      cfg.pin.mode = PinMode::Off;
    else if (value == "strip")
      cfg.pin.mode = PinMode::Strip;
    else
      throw ConfigError("pin.mode: expected off|strip");
  } else if (key == "pin.weight")
    cfg.pin.weight = to_double(key, value);
  else if (key == "pin.thickness")
    cfg.pin.thickness = to_double(key, value);
  else if (key == "pin.shear_fraction")
    cfg.pin.shear_fraction = to_double(key, value);
  else if (key == "output.dir")
    cfg.output.dir = value;
  else if (key == "output.field_every")
    cfg.output.field_every = static_cast<int>(to_long(key, value));
  else if (key == "output.energy_every")
    cfg.output.energy_every = static_cast<int>(to_long(key, value));
  else if (key == "output.hminus")
    cfg.output.with_hminus = to_onoff(key, value);
  else
    throw ConfigError("unknown config key '" + key + "'");
}

/// key=value override, the CLI form.
inline void apply_override(SimConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' is not key=value");
  apply_config_key(cfg, detail::trim(assignment.substr(0, eq)),
                   detail::trim(assignment.substr(eq + 1)));
}

inline SimConfig parse_config_file(const std::string& path,
                                   SimConfig base = SimConfig{}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config", path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key = value");
    apply_config_key(base, detail::trim(line.substr(0, eq)),
                     detail::trim(line.substr(eq + 1)));
  }
  return base;
}

// ---------------------------------------------------------------------------
// Run driver.

struct RunReport {
  std::vector<EnergyRow> rows;
  SchemeState final_state;
  long total_vcycles = 0;
  double seconds_solve = 0.0;
  double seconds_energy = 0.0;
  double seconds_io = 0.0;
  double seconds_total = 0.0;
};

struct InitialCondition {
  CellField phi;
  PinningSpec pin;
};

inline InitialCondition build_initial(const SimConfig& cfg) {
  InitialCondition out;
  switch (cfg.ic.type) {
    case IcType::Benchmark:
      out.phi = init_benchmark(cfg.grid);
      break;
    case IcType::Random:
      out.phi = init_random(cfg.grid, cfg.ic.mean, cfg.ic.amp, cfg.ic.seed);
      break;
    case IcType::Seeds:
      out.phi = init_seed_perturbations(cfg.grid, cfg.ic.mean, cfg.ic.sites,
                                        cfg.ic.bump_amp, cfg.ic.bump_radius,
                                        cfg.ic.seed);
      break;
    case IcType::Crystal: {
      CrystalStrip strip = init_crystal_strip(
          cfg.grid, cfg.ic.phi_s, cfg.ic.phi_l, cfg.params.epsilon,
          cfg.ic.layers, cfg.pin.weight, cfg.pin.shear_fraction);
      out.phi = std::move(strip.phi);
      if (cfg.pin.mode == PinMode::Strip) out.pin = std::move(strip.pin);
      return out;
    }
  }
  if (cfg.pin.mode == PinMode::Strip)
    out.pin = make_band_pinning(out.phi, cfg.pin.weight, cfg.pin.thickness);
  return out;
}

namespace detail {

inline std::string field_path(const std::string& dir, long step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "phi_%08ld.fld", step);
  return dir + "/" + buf;
}

class PhaseTimer {
 public:
  double& slot;
  std::chrono::steady_clock::time_point start;
  explicit PhaseTimer(double& s) : slot(s), start(clock_now()) {}
  ~PhaseTimer() { slot += seconds_since(start); }
  static std::chrono::steady_clock::time_point clock_now() {
    return std::chrono::steady_clock::now();
  }
  static double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(clock_now() - t0).count();
  }
};

}  // namespace detail

/// Advances cfg.scheme to t_final, sampling energy rows and field
/// snapshots at the configured cadences.  On NoConvergence everything
/// sampled so far is flushed before the error (with its failing step
/// index) is rethrown.
inline RunReport run(const SimConfig& cfg) {
  cfg.validate();
  const auto t0 = detail::PhaseTimer::clock_now();
  RunReport report;
  InitialCondition ic = build_initial(cfg);
  ic.pin.validate(cfg.grid);
  SchemeState state = initial_state(std::move(ic.phi));

  const bool to_disk = !cfg.output.dir.empty();
  if (to_disk) std::filesystem::create_directories(cfg.output.dir);

  const long n_steps = cfg.steps();
  auto sample_energy = [&](const SchemeState& st, const StepDiagnostics* d) {
    detail::PhaseTimer timer(report.seconds_energy);
    EnergyRow row;
    row.step = st.k;
    row.t = st.t;
    row.energy = make_energy_report(st, cfg.params, cfg.elliptic, ic.pin,
                                    cfg.output.with_hminus);
    if (d) {
      row.vcycles = d->vcycles;
      row.residual = d->residual;
      row.tol_abs = d->tol_abs;
    }
    report.rows.push_back(row);
  };

  auto flush = [&](const SchemeState& st) {
    if (!to_disk) return;
    detail::PhaseTimer timer(report.seconds_io);
    write_energy_series(report.rows, cfg.output.dir + "/energy.csv");
    write_field(st.phi, st.t, cfg.output.dir + "/final.fld");
  };

  sample_energy(state, nullptr);
  if (to_disk && cfg.output.field_every > 0)
    write_field(state.phi, state.t, detail::field_path(cfg.output.dir, 0));

  StepOptions opts;
  opts.with_energy = false;  // sampled separately at the energy cadence
  try {
    for (long k = 1; k <= n_steps; ++k) {
      StepDiagnostics diag;
      {
        detail::PhaseTimer timer(report.seconds_solve);
        auto [next, d] = step(state, cfg.scheme, cfg.params, cfg.mg, ic.pin,
                              cfg.elliptic, opts);
        state = std::move(next);
        diag = d;
      }
      report.total_vcycles += diag.vcycles;
      if (k % cfg.output.energy_every == 0) sample_energy(state, &diag);
      if (to_disk && cfg.output.field_every > 0 &&
          k % cfg.output.field_every == 0) {
        detail::PhaseTimer timer(report.seconds_io);
        write_field(state.phi, state.t, detail::field_path(cfg.output.dir, k));
      }
    }
  } catch (const NoConvergence&) {
    flush(state);
    throw;
  }

  flush(state);
  report.final_state = std::move(state);
  report.seconds_total = detail::PhaseTimer::seconds_since(t0);
  return report;
}

// ---------------------------------------------------------------------------
// Studies.

enum class RefinementPath { Quadratic, Linear };  // s = 0.025 h^2 | s = 0.05 h

inline double refinement_step(RefinementPath path, double h) {
  return path == RefinementPath::Quadratic ? 0.025 * h * h : 0.05 * h;
}

struct ConvergenceRow {
  double h_coarse = 0.0;
  double h_fine = 0.0;
  double error = 0.0;  // ||phi_coarse - R phi_fine||_2 / sqrt(Lx Ly), the
                       // root-mean-square difference
  double rate = 0.0;   // log2(err_prev / err), NaN on the first row
};

struct ConvergenceTable {
  std::vector<int> m_list;
  std::vector<ConvergenceRow> rows;
};

/// Successive-difference (Cauchy) refinement errors: each run's final
/// field is compared against the next finer one restricted by cell
/// averaging, in the weighted 2-norm of the coarse grid.
inline ConvergenceTable convergence_study(const SimConfig& base,
                                          SchemeTag scheme,
                                          RefinementPath path,
                                          const std::vector<int>& m_list) {
  if (m_list.size() < 2)
    throw ConfigError("convergence study needs at least two resolutions");
  for (std::size_t k = 1; k < m_list.size(); ++k)
    if (m_list[k] != 2 * m_list[k - 1])
      throw ConfigError("convergence study resolutions must double");

  const double lx = base.grid.lx();
  const double ly = base.grid.ly();
  std::vector<std::future<CellField>> jobs;
  for (int m : m_list) {
    SimConfig cfg = base;
    cfg.scheme = scheme;
    cfg.grid.m = m;
    cfg.grid.h = lx / m;
    cfg.grid.n = static_cast<int>(std::llround(ly / cfg.grid.h));
    cfg.params.s = refinement_step(path, cfg.grid.h);
    cfg.output = OutputConfig{};
    cfg.output.energy_every = 1 << 30;  // diagnostics off for the sweep
    cfg.output.with_hminus = false;
    jobs.push_back(std::async(std::launch::async, [cfg] {
      return run(cfg).final_state.phi;
    }));
  }

  std::vector<CellField> finals;
  finals.reserve(jobs.size());
  for (auto& j : jobs) finals.push_back(j.get());

  ConvergenceTable table;
  table.m_list = m_list;
  double prev_err = 0.0;
  for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
    const CellField& coarse = finals[k];
    const CellField restricted = restrict_field(finals[k + 1]);
    const GridSpec& g = coarse.spec();
    CellField diff(g);
    for (int j = 1; j <= g.n; ++j) {
      const double* a = coarse.row(j);
      const double* b = restricted.row(j);
      double* d = diff.row(j);
      for (int i = 1; i <= g.m; ++i) d[i] = a[i] - b[i];
    }
    ConvergenceRow row;
    row.h_coarse = g.h;
    row.h_fine = finals[k + 1].spec().h;
    row.error = norm2(diff) / std::sqrt(g.area());
    row.rate = (k == 0) ? std::numeric_limits<double>::quiet_NaN()
                        : std::log2(prev_err / row.error);
    prev_err = row.error;
    table.rows.push_back(row);
  }
  return table;
}

struct MgBenchEntry {
  int m = 0;
  double h = 0.0;
  std::vector<double> history;   // residual per V-cycle at the last step
  std::vector<double> factors;   // consecutive contraction ratios
  double mean_factor = 0.0;      // geometric mean, NaN if < 2 history points
  double asymptotic_factor = 0.0;  // geometric mean of the last <= 4 ratios,
                                   // past the initial transient
};

/// Fixes s (default 10), advances the second-order scheme a fixed number
/// of steps per grid, and reports the per-V-cycle residual history of the
/// last step together with its contraction factors.
inline std::vector<MgBenchEntry> mg_efficiency_study(
    const SimConfig& base, const std::vector<int>& m_list, double s = 10.0,
    int steps = 20) {
  const double lx = base.grid.lx();
  const double ly = base.grid.ly();
  std::vector<std::future<MgBenchEntry>> jobs;
  for (int m : m_list) {
    SimConfig cfg = base;
    cfg.scheme = SchemeTag::SecondOrder;
    cfg.grid.m = m;
    cfg.grid.h = lx / m;
    cfg.grid.n = static_cast<int>(std::llround(ly / cfg.grid.h));
    cfg.params.s = s;
    cfg.mg.l_max = 1;
    cfg.validate();
    jobs.push_back(std::async(std::launch::async, [cfg, steps] {
      InitialCondition ic = build_initial(cfg);
      SchemeState state = initial_state(std::move(ic.phi));
      MgBenchEntry entry;
      entry.m = cfg.grid.m;
      entry.h = cfg.grid.h;
      for (int k = 1; k <= steps; ++k) {
        NonlinearSystem sys = assemble(cfg.scheme, state, cfg.params, ic.pin);
        SolveResult sol = solve_to_tolerance(sys, cfg.mg);
        state = finalize(cfg.scheme, std::move(sol.u.phi), state, cfg.params);
        if (k == steps) entry.history = std::move(sol.history);
      }
      for (std::size_t i = 0; i + 1 < entry.history.size(); ++i)
        if (entry.history[i + 1] > 0.0)
          entry.factors.push_back(entry.history[i] / entry.history[i + 1]);
      if (entry.factors.empty()) {
        entry.mean_factor = std::numeric_limits<double>::quiet_NaN();
        entry.asymptotic_factor = std::numeric_limits<double>::quiet_NaN();
      } else {
        auto geomean = [](const std::vector<double>& v, std::size_t first) {
          double log_sum = 0.0;
          for (std::size_t q = first; q < v.size(); ++q)
            log_sum += std::log(v[q]);
          return std::exp(log_sum / static_cast<double>(v.size() - first));
        };
        entry.mean_factor = geomean(entry.factors, 0);
        const std::size_t tail =
            entry.factors.size() > 4 ? entry.factors.size() - 4 : 0;
        entry.asymptotic_factor = geomean(entry.factors, tail);
      }
      return entry;
    }));
  }
  std::vector<MgBenchEntry> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

/// D(s) = ||phi_base(t_f) - phi_cmp(t_f)||_2 / ||phi_base(t_f)||_2.
inline double scaled_difference(const RunReport& base, const RunReport& cmp) {
  const CellField& a = base.final_state.phi;
  const CellField& b = cmp.final_state.phi;
  if (!a.same_grid(b))
    throw GridMismatch("scaled_difference: runs on different grids");
  const GridSpec& g = a.spec();
  CellField diff(g);
  for (int j = 1; j <= g.n; ++j) {
    const double* ar = a.row(j);
    const double* br = b.row(j);
    double* d = diff.row(j);
    for (int i = 1; i <= g.m; ++i) d[i] = ar[i] - br[i];
  }
  const double na = norm2(a);
  if (na == 0.0) throw Error("scaled_difference: base field is zero");
  return norm2(diff) / na;
}

}  // namespace mpfc

#endif  // MPFC_SIM_HPP
