#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdstab/boundary_symbol.hpp"
#include "fdstab/energy.hpp"
#include "fdstab/errors.hpp"
#include "fdstab/registry.hpp"
#include "fdstab/report.hpp"
#include "fdstab/scheme_io.hpp"
#include "fdstab/sim.hpp"
#include "fdstab/symbol.hpp"

namespace fdstab {

/// Full double precision, shortest form that round-trips.
inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ExperimentConfig {
  std::string experiment;
  std::string scheme;  ///< registry spec ("leapfrog1d:a=-1") or path to a scheme file; empty = default
  int grid = 0;        ///< cells per unit length (1D) or per axis; 0 = experiment default
  long steps = 0;      ///< 0 = experiment default
  std::vector<double> gammas;
  std::string out_dir;  ///< empty = write nothing
  std::uint64_t seed = 20140901;
  long stride = 0;  ///< plot-data stride; 0 = experiment default
  std::optional<SchemeFile> scheme_def;  ///< scheme embedded in a config file; overrides `scheme`
};

struct ExperimentOutcome {
  int exit_code = 0;  ///< 0 pass, 2 check failed, 1 operational error
  nlohmann::json summary;
};

/// Scheme and optional boundary rows from a registry spec or a file path.
inline SchemeFile resolve_scheme(const std::string& spec, const std::string& fallback) {
  const std::string s = spec.empty() ? fallback : spec;
  if (s.size() > 5 && s.substr(s.size() - 5) == ".json") return load_scheme_file(s);
  static const SchemeRegistry registry = build_registry();
  return {registry.parse(s), std::nullopt};
}

inline SchemeFile config_scheme(const ExperimentConfig& cfg, const std::string& fallback) {
  if (cfg.scheme_def) return *cfg.scheme_def;
  return resolve_scheme(cfg.scheme, fallback);
}

/// Experiment config file: {"experiment", "scheme": name | path | scheme object, "grid", "steps",
/// "gammas", "out", "seed", "stride"}. Relative scheme paths resolve against the config's directory.
inline ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {}) {
  detail::reject_unknown(j, {"experiment", "scheme", "grid", "steps", "gammas", "out", "seed", "stride"}, "config");
  ExperimentConfig cfg;
  try {
    cfg.experiment = j.at("experiment").get<std::string>();
    if (j.contains("scheme")) {
      const auto& sj = j.at("scheme");
      if (sj.is_object()) {
        cfg.scheme_def = scheme_from_json(sj, "inline");
      } else {
        cfg.scheme = sj.get<std::string>();
        if (cfg.scheme.ends_with(".json") && std::filesystem::path(cfg.scheme).is_relative()) {
          cfg.scheme = (base / cfg.scheme).string();
        }
      }
    }
    cfg.grid = j.value("grid", 0);
    cfg.steps = j.value("steps", 0L);
    cfg.gammas = j.value("gammas", std::vector<double>{});
    cfg.out_dir = j.value("out", std::string{});
    cfg.seed = j.value("seed", cfg.seed);
    cfg.stride = j.value("stride", 0L);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("config file " + path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

namespace detail {

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const ExperimentConfig& cfg, const std::string& columns)
      : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    out_ << "# experiment=" << cfg.experiment << ", seed=" << cfg.seed << "\n" << columns << "\n";
  }
  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(v), first = false), ...);
    out_ << "\n";
  }

 private:
  static std::string cell(double v) { return fmt17(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  std::ofstream out_;
};

inline std::filesystem::path out_path(const ExperimentConfig& cfg, const std::string& file) {
  std::filesystem::create_directories(cfg.out_dir);
  return std::filesystem::path(cfg.out_dir) / file;
}

/// cos^2 bump of the given width centered at c, as a function of x.
inline double bump(double x, double c, double width) {
  const double u = (x - c) / width;
  if (std::abs(u) >= 0.5) return 0.0;
  const double v = std::cos(std::numbers::pi * u);
  return v * v;
}

/// Open-axis levels f^sigma_j = bump(j dx - a sigma dt) on [j_lo, j_hi] (exact transport seeding).
inline std::vector<GridFunction> bump_levels(const MultistepScheme& scheme, double a, double dt, int j_lo,
                                             int j_hi, double center, double width) {
  const double dx = dt / scheme.lambda()[0];
  std::vector<GridFunction> out;
  for (int sigma = 0; sigma <= scheme.s(); ++sigma) {
    GridFunction g(j_lo, j_hi, 1, {dx});
    for (int j = std::max(j_lo, 1); j <= j_hi; ++j) g(j) = bump(j * dx - a * sigma * dt, center, width);
    out.push_back(std::move(g));
  }
  return out;
}

/// x-centroid of |u|^2.
inline double centroid(const GridFunction& g) {
  double m = 0.0;
  double mx = 0.0;
  for (int j = g.j_min(); j <= g.j_max(); ++j) {
    const double w = g.slice_norm2(j);
    m += w;
    mx += w * j * g.dx()[0];
  }
  return m > 0.0 ? mx / m : 0.0;
}

/// Transport velocity a of a consistent 1D scheme for u_t + a u_x = 0:
/// lambda a = sum l a_{l,sigma} / sum sigma a_{l,sigma}.
inline double transport_velocity(const MultistepScheme& scheme) {
  if (scheme.d() != 1) throw InvalidArgument("transport velocity: 1D schemes only");
  double num = 0.0;
  double den = 0.0;
  for (const auto& e : scheme.entries()) {
    num += e.l.first() * e.a;
    den += e.sigma * e.a;
  }
  if (den == 0.0) throw InvalidArgument("transport velocity: scheme is not consistent");
  return num / den / scheme.lambda()[0];
}

}  // namespace detail

/// Write frames n = k * stride (k >= 1, n <= N) of `traj`; the final frame alone when
/// stride exceeds the run. Returns the frame paths. An index file lists the frames.
inline std::vector<std::filesystem::path> emit_plotdata(const Trajectory& traj, long stride,
                                                        const std::filesystem::path& dir,
                                                        const std::string& header = {}) {
  if (stride < 1) throw InvalidArgument("emit_plotdata: stride must be >= 1");
  if (traj.n.empty()) throw InvalidArgument("emit_plotdata: empty trajectory");
  std::vector<std::size_t> pick;
  for (std::size_t i = 0; i < traj.n.size(); ++i) {
    if (traj.n[i] >= stride && traj.n[i] % stride == 0) pick.push_back(i);
  }
  if (pick.empty()) pick.push_back(traj.n.size() - 1);
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  std::ofstream index(dir / "frames.index");
  if (!index) throw Error("cannot write " + (dir / "frames.index").string());
  for (std::size_t i : pick) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%08ld.csv", traj.n[i]);
    const auto path = dir / name;
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    const auto& g = traj.levels[i];
    if (!header.empty()) out << "# " << header << "\n";
    out << (g.d() == 2 ? "n,j1,j2,value\n" : "n,j1,value\n");
    for (int j1 = g.j_min(); j1 <= g.j_max(); ++j1) {
      for (int j2 = 0; j2 < g.n2(); ++j2) {
        out << traj.n[i] << "," << j1;
        if (g.d() == 2) out << "," << j2;
        out << "," << fmt17(g(j1, j2)) << "\n";
      }
    }
    index << traj.n[i] << "," << name << "\n";
    paths.push_back(path);
  }
  return paths;
}

// ---------------------------------------------------------------------------
// Reflection of a bump at a Dirichlet boundary.

struct ReflectionResult {
  int cells = 0;  ///< cells per unit length
  double dt = 0.0;
  long levels = 0;
  double initial_norm = 0.0;  ///< |||f^0|||
  double packet_norm = 0.0;   ///< |||u^N||| after reflection
  double packet_ratio = 0.0;  ///< packet_norm / initial_norm
  double packet_velocity = 0.0;  ///< centroid speed of |u|^2 over the last snapshot interval
  double oscillation = 0.0;      ///< -sum u_j u_{j+1} / sum u_j^2 at the final level (1 for (-1)^j)
  double semigroup = 0.0;
  RunResult run;
};

/// Leap-frog (or any explicit scheme) on [0, 1] with J cells, Dirichlet rows, a cos^2 bump
/// of width 1/8 centered at 1/2, run until t = t_final.
inline ReflectionResult reflection_run(const MultistepScheme& scheme, int J, double t_final = 2.0,
                                       long stride = 0) {
  if (!scheme.is_explicit()) throw InvalidArgument("reflection: the truncation rule needs an explicit scheme");
  const double a = detail::transport_velocity(scheme);
  const double dx = 1.0 / J;
  const double dt = scheme.lambda()[0] * dx;
  if (dt > 1.0) throw InvalidArgument("reflection: dt exceeds 1");
  const long N = std::lround(t_final / dt);
  const long steps = N - scheme.s();
  const int hi_data = static_cast<int>(std::ceil((0.5 + 1.0 / 16.0) / dx)) + 1;
  const int j_max = explicit_right_extent(scheme, hi_data, steps);

  ProblemSpec spec{scheme, ProblemKind::ibvp_halfline, BoundaryStencilSet::dirichlet(scheme), 1 - scheme.r1(), j_max};
  spec.dt = dt;
  spec.steps = steps;
  spec.initial = detail::bump_levels(scheme, a, dt, spec.j_min, j_max, 0.5, 0.125);
  spec.trajectory_stride = stride > 0 ? stride : std::max(1L, N / 4);
  ReflectionResult res;
  res.cells = J;
  res.dt = dt;
  res.run = run(spec);
  res.levels = res.run.norms.N;
  res.initial_norm = std::sqrt(spec.initial.front().norm2());
  res.packet_norm = std::sqrt(res.run.norms.norm2.back());
  res.packet_ratio = res.packet_norm / res.initial_norm;
  res.semigroup = semigroup_ratio(res.run.norms);
  const auto& traj = res.run.trajectory;
  if (traj.n.size() >= 2) {
    const std::size_t k = traj.n.size() - 1;
    const double span = static_cast<double>(traj.n[k] - traj.n[k - 1]) * dt;
    res.packet_velocity = (detail::centroid(traj.levels[k]) - detail::centroid(traj.levels[k - 1])) / span;
  }
  const auto& last = res.run.final_window.level(static_cast<std::size_t>(scheme.s()));
  double cross = 0.0;
  for (int j = last.j_min(); j < last.j_max(); ++j) cross += last(j) * last(j + 1);
  res.oscillation = -cross * dx / last.norm2();
  return res;
}

// ---------------------------------------------------------------------------
// Auxiliary dissipative problem.

struct AuxiliaryResult {
  double dt = 0.0;
  double E0_first = 0.0;
  double E0_last = 0.0;
  double max_increase = 0.0;  ///< max_n (E0(n+1) - E0(n)) / E0(0)
  double semigroup = 0.0;
  int periodic_size = 0;
  RunResult run;
};

/// g = 0, bump data on [0, 1] sampled with J cells, `steps` steps.
inline AuxiliaryResult auxiliary_run(const MultistepScheme& scheme, int J, long steps, bool energy) {
  if (!scheme.is_explicit()) throw InvalidArgument("auxiliary: the truncation rule needs an explicit scheme");
  const double a = detail::transport_velocity(scheme);
  const double dx = 1.0 / J;
  const double dt = scheme.lambda()[0] * dx;
  const int hi_data = static_cast<int>(std::ceil((0.5 + 1.0 / 16.0) / dx)) + 1;
  const int j_max = explicit_right_extent(scheme, hi_data, steps);
  const int j_min = explicit_left_extent(scheme, 1, steps);
  ProblemSpec spec{scheme, ProblemKind::auxiliary, std::nullopt, j_min, j_max};
  spec.dt = dt;
  spec.steps = steps;
  spec.initial = detail::bump_levels(scheme, a, dt, j_min, j_max, 0.5, 0.125);
  spec.energy_trace = energy;
  AuxiliaryResult res;
  res.dt = dt;
  res.run = run(spec);
  res.semigroup = semigroup_ratio(res.run.norms);
  if (energy) {
    const auto& e = res.run.energy.E0;
    res.E0_first = e.front();
    res.E0_last = e.back();
    for (std::size_t i = 1; i < e.size(); ++i) res.max_increase = std::max(res.max_increase, (e[i] - e[i - 1]) / e.front());
    res.periodic_size = res.run.energy.periodic_size;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Experiment drivers.

namespace detail {

inline ExperimentOutcome finish(const ExperimentConfig& cfg, nlohmann::json summary, bool pass) {
  summary["experiment"] = cfg.experiment;
  summary["seed"] = cfg.seed;
  summary["pass"] = pass;
  if (!cfg.out_dir.empty()) {
    std::ofstream out(out_path(cfg, "summary.json"));
    out << summary.dump(2) << "\n";
  }
  return {pass ? 0 : 2, std::move(summary)};
}

inline ExperimentOutcome dirichlet_reflection(const ExperimentConfig& cfg) {
  const auto sf = config_scheme(cfg, "leapfrog1d:a=-1,lambda=0.5");
  const int J = cfg.grid > 0 ? cfg.grid : 400;
  const double t_final = cfg.steps > 0 ? cfg.steps * sf.scheme.lambda()[0] / J : 2.0;
  const long N = std::lround(t_final * J / sf.scheme.lambda()[0]);
  const long stride = cfg.stride > 0 ? cfg.stride : std::max(1L, N / 4);
  const auto r = reflection_run(sf.scheme, J, t_final, stride);
  // Refinement study for the semigroup constant.
  const auto r2 = reflection_run(sf.scheme, 2 * J, t_final);
  const bool norm_ok = std::abs(r.packet_ratio - 1.0) <= 0.1;
  const bool refine_ok = std::isfinite(r.semigroup) && r2.semigroup <= r.semigroup * 1.01;
  const bool moves_right = r.packet_velocity > 0.0;
  if (!cfg.out_dir.empty()) {
    CsvFile csv(out_path(cfg, "norms.csv"), cfg, "n,t,l2norm");
    for (std::size_t n = 0; n < r.run.norms.norm2.size(); ++n) {
      csv.row(static_cast<long>(n), static_cast<double>(n) * r.dt, std::sqrt(r.run.norms.norm2[n]));
    }
    emit_plotdata(r.run.trajectory, stride, std::filesystem::path(cfg.out_dir) / "frames",
                  "experiment=" + cfg.experiment + ", seed=" + std::to_string(cfg.seed));
  }
  nlohmann::json s{{"cells", J},
                   {"dt", r.dt},
                   {"levels", r.levels},
                   {"initial_norm", r.initial_norm},
                   {"packet_norm", r.packet_norm},
                   {"packet_ratio", r.packet_ratio},
                   {"semigroup_ratio", r.semigroup},
                   {"packet_velocity", r.packet_velocity},
                   {"oscillation", r.oscillation},
                   {"semigroup_ratio_refined", r2.semigroup},
                   {"checks",
                    {{"packet_norm_within_10pct", norm_ok},
                     {"packet_moves_right", moves_right},
                     {"semigroup_not_growing", refine_ok}}}};
  return finish(cfg, std::move(s), norm_ok && refine_ok && moves_right);
}

inline std::vector<GridFunction> random_periodic_levels(const MultistepScheme& scheme, int n, double dt,
                                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> dx;
  for (double l : scheme.lambda()) dx.push_back(dt / l);
  std::vector<GridFunction> out;
  for (int k = 0; k <= scheme.s(); ++k) {
    GridFunction g(0, n - 1, scheme.d() == 2 ? n : 1, dx, true);
    for (double& v : g.values()) v = gauss(rng);
    out.push_back(std::move(g));
  }
  return out;
}

inline ExperimentOutcome cauchy_energy(const ExperimentConfig& cfg) {
  const auto sf = config_scheme(cfg, "leapfrog1d");
  const auto& scheme = sf.scheme;
  const int n = cfg.grid > 0 ? cfg.grid : 64;
  const long steps = cfg.steps > 0 ? cfg.steps : 1000;
  const double dt = 1.0 / n * scheme.lambda()[0];
  ProblemSpec spec{scheme, ProblemKind::cauchy_periodic, std::nullopt, 0, n - 1, scheme.d() == 2 ? n : 1};
  spec.dt = dt;
  spec.steps = steps;
  spec.initial = random_periodic_levels(scheme, n, dt, cfg.seed);
  spec.energy_trace = true;
  const auto r = run(spec);
  const auto& e = r.energy.E0;
  double worst = 0.0;
  for (std::size_t i = 1; i < e.size(); ++i) worst = std::max(worst, e[i] - e[i - 1]);
  const double rel = worst / e.front();
  const bool pass = !r.unstable && rel <= 1e-12;
  if (!cfg.out_dir.empty()) {
    CsvFile csv(out_path(cfg, "energy.csv"), cfg, "n,E0,D0,l2norm");
    for (std::size_t i = 0; i < e.size(); ++i) {
      csv.row(r.energy.n[i], e[i], r.energy.D0[i], r.energy.l2norm[i]);
    }
  }
  nlohmann::json s{{"scheme", scheme.name()},
                   {"grid", n},
                   {"steps", steps},
                   {"E0_first", e.front()},
                   {"E0_last", e.back()},
                   {"max_relative_increase", rel},
                   {"unstable", r.unstable},
                   {"checks", {{"E0_nonincreasing", pass}}}};
  return finish(cfg, std::move(s), pass);
}

/// Family member at stability parameter c: lambda|a| = c (1D), lambda1|a1| + lambda2|a2| = c
/// (lf2d_v1), max(lambda1|a1|, lambda2|a2|) = c (lf2d_v2).
inline MultistepScheme family_member(const std::string& family, double c) {
  if (family == "leapfrog1d") return leapfrog1d(-1.0, c);
  if (family == "bdf2_1d") return bdf2_1d(1.0, c);
  if (family == "lf2d_v1") return lf2d_v1(1.0, 1.0, 0.5 * c, 0.5 * c);
  if (family == "lf2d_v2") return lf2d_v2(1.0, 1.0, c, c);
  throw InvalidArgument("von-neumann-scan: no parameter family for '" + family + "'");
}

inline ExperimentOutcome von_neumann_scan(const ExperimentConfig& cfg) {
  const std::string family = cfg.scheme.empty() ? "lf2d_v1" : cfg.scheme.substr(0, cfg.scheme.find(':'));
  const std::vector<double> values{0.9, 1.1};
  nlohmann::json rows = nlohmann::json::array();
  std::vector<bool> passed;
  std::unique_ptr<CsvFile> csv;
  if (!cfg.out_dir.empty()) csv = std::make_unique<CsvFile>(out_path(cfg, "scan.csv"), cfg, "value,pass,max_root_modulus");
  for (double c : values) {
    Assumption1Options opt;
    opt.scan.seed = cfg.seed;
    if (cfg.grid > 0) opt.scan.n_grid = cfg.grid;
    const auto rep = check_assumption1(family_member(family, c), opt);
    passed.push_back(rep.pass);
    rows.push_back({{"value", c}, {"report", to_json(rep)}});
    if (csv) csv->row(c, rep.pass ? 1 : 0, rep.metrics.at("max_root_modulus"));
  }
  const bool pass = passed[0] && !passed[1];
  return finish(cfg, {{"family", family}, {"scan", rows}, {"checks", {{"pass_below_fail_above", pass}}}}, pass);
}

inline ExperimentOutcome auxiliary_energy(const ExperimentConfig& cfg) {
  const auto sf = config_scheme(cfg, "leapfrog1d:a=-1,lambda=0.8");
  const int J = cfg.grid > 0 ? cfg.grid : 50;
  const long steps = cfg.steps > 0 ? cfg.steps : 1000;
  const auto r = auxiliary_run(sf.scheme, J, steps, true);
  const auto r2 = auxiliary_run(sf.scheme, 2 * J, 2 * steps, false);
  const bool mono = !r.run.unstable && r.max_increase <= 1e-12;
  const double change = std::abs(r2.semigroup - r.semigroup) / r.semigroup;
  const bool stable = std::isfinite(r.semigroup) && change <= 0.2;
  if (!cfg.out_dir.empty()) {
    CsvFile csv(out_path(cfg, "energy.csv"), cfg, "n,E0,D0,l2norm");
    const auto& e = r.run.energy;
    for (std::size_t i = 0; i < e.E0.size(); ++i) csv.row(e.n[i], e.E0[i], e.D0[i], e.l2norm[i]);
  }
  nlohmann::json s{{"cells", J},
                   {"steps", steps},
                   {"E0_first", r.E0_first},
                   {"E0_last", r.E0_last},
                   {"max_relative_increase", r.max_increase},
                   {"periodic_size", r.periodic_size},
                   {"semigroup_ratio", r.semigroup},
                   {"semigroup_ratio_half_dt", r2.semigroup},
                   {"semigroup_change", change},
                   {"checks", {{"E0_nonincreasing", mono}, {"semigroup_stable_under_refinement", stable}}}};
  return finish(cfg, std::move(s), mono && stable);
}

/// Superposition u = v + w for one scheme with Dirichlet rows, bump data, `steps` steps.
inline SuperpositionResult superposition_run(const MultistepScheme& scheme, int J, long steps) {
  const double a = detail::transport_velocity(scheme);
  const double dt = scheme.lambda()[0] / J;
  const int hi_data = static_cast<int>(std::ceil((0.5 + 1.0 / 16.0) * J)) + 1;
  SuperpositionSpec sp{scheme, BoundaryStencilSet::dirichlet(scheme), dt, steps};
  if (scheme.is_explicit()) {
    sp.j_max = explicit_right_extent(scheme, hi_data, steps);
    sp.j_left = explicit_left_extent(scheme, 1, steps);
  } else {
    // Transport distance plus a margin for the exponentially small implicit tails.
    const int reach = static_cast<int>(std::ceil(std::abs(a) * steps * dt * J)) + 60;
    sp.j_max = hi_data + reach;
    sp.j_left = std::min(1 - scheme.r1(), -reach);
  }
  sp.initial = detail::bump_levels(scheme, a, dt, 1 - scheme.r1(), sp.j_max, 0.5, 0.125);
  return superposition_check(sp);
}

inline ExperimentOutcome superposition(const ExperimentConfig& cfg) {
  std::vector<std::string> names;
  if (cfg.scheme_def) {
    names = {""};
  } else if (cfg.scheme.empty()) {
    names = {"leapfrog1d:a=-1,lambda=0.8", "bdf2_1d:a=-1,lambda=0.8"};
  } else {
    names = {cfg.scheme};
  }
  const int J = cfg.grid > 0 ? cfg.grid : 100;
  const long steps = cfg.steps > 0 ? cfg.steps : 500;
  nlohmann::json rows = nlohmann::json::array();
  bool pass = true;
  for (const auto& name : names) {
    const auto sf = cfg.scheme_def ? *cfg.scheme_def : resolve_scheme(name, name);
    const auto r = superposition_run(sf.scheme, J, steps);
    const double tol = sf.scheme.is_explicit() ? 1e-10 : 1e-9;
    const bool ok = r.relative <= tol;
    pass = pass && ok;
    rows.push_back({{"scheme", name.empty() ? sf.scheme.name() : name}, {"relative_discrepancy", r.relative}, {"tolerance", tol}, {"pass", ok}});
  }
  return finish(cfg, {{"runs", rows}, {"steps", steps}}, pass);
}

inline ExperimentOutcome strong_stability(const ExperimentConfig& cfg) {
  const auto sf = config_scheme(cfg, "leapfrog1d:a=-1,lambda=0.8");
  const auto& scheme = sf.scheme;
  const int J = cfg.grid > 0 ? cfg.grid : 100;
  const long steps = cfg.steps > 0 ? cfg.steps : 500;
  const double dt = scheme.lambda()[0] / J;
  std::vector<double> gdt = cfg.gammas;
  if (gdt.empty()) {
    gdt = {0.05 / dt, 0.1 / dt, 0.2 / dt};
  }
  const int s1 = scheme.s() + 1;
  ProblemSpec spec{scheme, ProblemKind::ibvp_halfline, sf.boundary ? sf.boundary : BoundaryStencilSet::dirichlet(scheme),
                   1 - scheme.r1(), 0};
  spec.j_max = scheme.is_explicit() ? explicit_right_extent(scheme, 0, steps) : static_cast<int>(steps) + 60;
  spec.dt = dt;
  spec.steps = steps;
  // Boundary impulse at the first computed level.
  spec.boundary = [s1](long n, int j1, int) { return (n == s1 && j1 == 0) ? 1.0 : 0.0; };
  const auto r = run(spec);
  nlohmann::json rows = nlohmann::json::array();
  bool pass = !r.unstable;
  std::unique_ptr<CsvFile> csv;
  if (!cfg.out_dir.empty()) csv = std::make_unique<CsvFile>(out_path(cfg, "strong_stability.csv"), cfg, "gamma,gamma_dt,lhs,rhs,ratio,lhs_tail,rhs_tail");
  for (double g : gdt) {
    const auto t = strong_stability_residual(r.norms, g);
    const bool ok = std::isfinite(t.ratio) && t.lhs_tail <= 1e-6 * t.lhs;
    pass = pass && ok;
    rows.push_back({{"gamma", g}, {"gamma_dt", g * dt}, {"lhs", t.lhs}, {"rhs", t.rhs}, {"ratio", t.ratio},
                    {"lhs_tail", t.lhs_tail}, {"rhs_tail", t.rhs_tail}});
    if (csv) csv->row(g, g * dt, t.lhs, t.rhs, t.ratio, t.lhs_tail, t.rhs_tail);
  }
  return finish(cfg, {{"scheme", scheme.name()}, {"steps", steps}, {"gammas", rows}}, pass);
}

}  // namespace detail

inline std::vector<std::string> experiment_names() {
  return {"dirichlet-reflection", "cauchy-energy", "von-neumann-scan", "auxiliary-energy", "superposition",
          "strong-stability"};
}

/// Dispatch by name. Errors surface as exit code 1 with the message in the summary.
inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  try {
    if (cfg.experiment == "dirichlet-reflection") return detail::dirichlet_reflection(cfg);
    if (cfg.experiment == "cauchy-energy") return detail::cauchy_energy(cfg);
    if (cfg.experiment == "von-neumann-scan") return detail::von_neumann_scan(cfg);
    if (cfg.experiment == "auxiliary-energy") return detail::auxiliary_energy(cfg);
    if (cfg.experiment == "superposition") return detail::superposition(cfg);
    if (cfg.experiment == "strong-stability") return detail::strong_stability(cfg);
    throw InvalidArgument("unknown experiment '" + cfg.experiment + "'");
  } catch (const std::exception& e) {
    return {1, {{"experiment", cfg.experiment}, {"error", e.what()}}};
  }
}

}  // namespace fdstab
