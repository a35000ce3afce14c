#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fdstab/fdstab.hpp"

namespace {

using nlohmann::json;

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("FDSTAB_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != std::string(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw fdstab::InvalidArgument(std::string("FDSTAB_SEED is not an unsigned integer: ") + s);
  }
}

int exit_for(bool pass) { return pass ? 0 : 2; }

int cmd_check(const std::string& scheme_ref, const std::string& which, int grid, std::uint64_t seed) {
  const auto sf = fdstab::resolve_scheme(scheme_ref, scheme_ref);
  json out{{"scheme", sf.scheme.name()}, {"reports", json::array()}};
  bool pass = true;
  auto add = [&](const fdstab::Report& r) {
    pass = pass && r.pass;
    out["reports"].push_back(fdstab::to_json(r));
  };
  if (which == "0" || which == "all") add(fdstab::validate_scheme(sf.scheme, {.n_grid = grid}));
  if (which == "1" || which == "all") {
    fdstab::Assumption1Options opt;
    opt.scan.n_grid = grid;
    opt.scan.seed = seed;
    add(fdstab::check_assumption1(sf.scheme, opt));
  }
  if (which == "2" || which == "all") add(fdstab::check_assumption2(sf.scheme));
  out["pass"] = pass;
  std::cout << out.dump(2) << "\n";
  return exit_for(pass);
}

int cmd_run(fdstab::ExperimentConfig cfg) {
  const auto outcome = fdstab::run_experiment(cfg);
  std::cout << outcome.summary.dump(2) << "\n";
  if (outcome.exit_code == 1) std::cerr << "fdstab: " << outcome.summary.value("error", "error") << "\n";
  return outcome.exit_code;
}

struct ProbeArgs {
  std::string kind;
  std::string scheme;
  std::uint64_t seed = 20140901;
  long draws = 10000;
  int P1 = 1;
  double R0 = 2.0;
  bool random_w = false;
  int pad = 1;
  double tol = 0.05;
  long n_max = 10000;
};

int cmd_probe(const ProbeArgs& a) {
  const auto sf = fdstab::resolve_scheme(a.scheme, "leapfrog1d");
  json out{{"probe", a.kind}, {"scheme", sf.scheme.name()}, {"seed", a.seed}};
  bool pass = true;
  if (a.kind == "trace") {
    fdstab::TraceConstantOptions opt;
    opt.P1 = a.P1;
    opt.n_draws = a.draws;
    opt.seed = a.seed;
    opt.R0 = a.R0;
    opt.optimize_w = !a.random_w;
    opt.pad = a.pad;
    const auto r = fdstab::trace_constant_probe(sf.scheme, opt);
    json hist = json::array();
    for (const auto& [k, v] : r.history) hist.push_back({k, v});
    pass = r.last_decade_increase <= a.tol;
    out.update({{"running_max", r.running_max},
                {"history", hist},
                {"last_decade_increase", r.last_decade_increase},
                {"tolerance", a.tol},
                {"argmax_z", {r.argmax.z.real(), r.argmax.z.imag()}},
                {"argmax_eta", r.argmax.eta},
                {"optimized_w", opt.optimize_w}});
  } else if (a.kind == "power") {
    fdstab::PowerBoundOptions opt;
    opt.scan.seed = a.seed;
    opt.n_max = a.n_max;
    const auto r = fdstab::power_bound_probe(sf.scheme, opt);
    json hist = json::array();
    for (const auto& [n, v] : r.history) hist.push_back({n, v});
    pass = !r.overflow;
    out.update({{"c1_estimate", r.c1_estimate},
                {"argmax_xi", r.argmax_xi},
                {"argmax_n", r.argmax_n},
                {"overflow", r.overflow},
                {"overflow_n", r.overflow_n},
                {"history", hist},
                {"log_growth_rate", r.log_growth_rate}});
  } else {
    const auto r = fdstab::gauss_lucas_check(sf.scheme);
    pass = r.pass;
    out["report"] = fdstab::to_json(r);
  }
  out["pass"] = pass;
  std::cout << out.dump(2) << "\n";
  return exit_for(pass);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability toolkit for multistep finite difference schemes"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_flag;

  auto* check = app.add_subcommand("check", "Check a scheme against the standing assumptions");
  std::string check_scheme;
  std::string assumption = "all";
  int check_grid = 0;
  check->add_option("scheme", check_scheme, "scheme file or registry name")->required();
  check->add_option("--assumption", assumption, "0, 1, 2 or all")
      ->check(CLI::IsMember({"0", "1", "2", "all"}));
  check->add_option("--grid", check_grid, "frequency grid points per axis (0 = default)");
  check->add_option("--seed", seed_flag, "random seed");

  auto* run = app.add_subcommand("run", "Run an experiment");
  fdstab::ExperimentConfig cfg;
  std::string config_file;
  run->add_option("experiment", cfg.experiment, "experiment name")
      ->check(CLI::IsMember(fdstab::experiment_names()));
  run->add_option("--config", config_file, "experiment config file (JSON)")->check(CLI::ExistingFile);
  run->add_option("--scheme", cfg.scheme, "registry spec (name:key=value,...) or scheme file");
  run->add_option("--gamma", cfg.gammas, "damping rate (repeatable)");
  run->add_option("--steps", cfg.steps, "time steps");
  run->add_option("--grid", cfg.grid, "cells per unit length or per axis");
  run->add_option("--stride", cfg.stride, "plot-data stride in time levels");
  run->add_option("--out", cfg.out_dir, "output directory");
  run->add_option("--seed", seed_flag, "random seed");

  auto* probe = app.add_subcommand("probe", "Empirical constant probes");
  ProbeArgs pa;
  probe->add_option("kind", pa.kind, "trace, power or gauss-lucas")
      ->required()
      ->check(CLI::IsMember({"trace", "power", "gauss-lucas"}));
  probe->add_option("--scheme", pa.scheme, "registry spec or scheme file");
  probe->add_option("--draws", pa.draws, "trace: number of random draws");
  probe->add_option("--P1", pa.P1, "trace: number of controlled slices");
  probe->add_option("--R0", pa.R0, "trace: outer radius for z");
  probe->add_flag("--random-w", pa.random_w, "trace: draw w at random instead of maximizing over it");
  probe->add_option("--pad", pa.pad, "trace: support padding for the maximizing w");
  probe->add_option("--tol", pa.tol, "trace: allowed last-decade increase");
  probe->add_option("--n-max", pa.n_max, "power: largest power");
  probe->add_option("--seed", seed_flag, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::uint64_t seed = 20140901;
    if (run->parsed() && !config_file.empty()) {
      auto file_cfg = fdstab::load_config_file(config_file);
      if (!cfg.experiment.empty() && cfg.experiment != file_cfg.experiment) {
        throw fdstab::InvalidArgument("experiment name differs from the config file's");
      }
      if (!cfg.scheme.empty()) {
        file_cfg.scheme = cfg.scheme;
        file_cfg.scheme_def.reset();
      }
      if (!cfg.gammas.empty()) file_cfg.gammas = cfg.gammas;
      if (cfg.steps > 0) file_cfg.steps = cfg.steps;
      if (cfg.grid > 0) file_cfg.grid = cfg.grid;
      if (cfg.stride > 0) file_cfg.stride = cfg.stride;
      if (!cfg.out_dir.empty()) file_cfg.out_dir = cfg.out_dir;
      cfg = std::move(file_cfg);
    } else if (run->parsed() && cfg.experiment.empty()) {
      throw fdstab::InvalidArgument("run: give an experiment name or --config");
    }
    seed = cfg.seed;
    if (auto e = env_seed()) seed = *e;
    if (seed_flag) seed = *seed_flag;

    if (check->parsed()) return cmd_check(check_scheme, assumption, check_grid, seed);
    if (run->parsed()) {
      cfg.seed = seed;
      return cmd_run(cfg);
    }
    pa.seed = seed;
    return cmd_probe(pa);
  } catch (const std::exception& e) {
    std::cerr << "fdstab: " << e.what() << "\n";
    return 1;
  }
}
