// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "fdstab/fdstab.hpp"
#include "oracles.hpp"

using namespace fdstab;
using oracle::cplx;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool pass = o.pass;
  std::string timing = num(secs) + " s";
  if (budget_s > 0.0) {
    timing += " of " + num(budget_s) + " s";
    if (secs > budget_s) {
      pass = false;
      timing += ", over budget";
    }
  }
  if (!pass) ++failures;
  std::printf("%s %2d  %s: %s (%s)\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), timing.c_str());
  std::fflush(stdout);
}

StateWindow random_window(const MultistepScheme& s, int n, std::size_t levels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::vector<double> dx(s.lambda().size(), 1.0 / n);
  std::vector<GridFunction> lv;
  for (std::size_t k = 0; k < levels; ++k) {
    GridFunction f(0, n - 1, s.d() == 2 ? n : 1, dx, true);
    for (double& v : f.values()) v = g(rng);
    lv.push_back(std::move(f));
  }
  return StateWindow(std::move(lv));
}

Outcome balance_identity() {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> deg(1, 5);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = deg(rng);
    const auto roots = oracle::random_stable_roots(rng, n, 1e-2);
    const Polynomial p(oracle::expand_roots(roots, {g(rng), g(rng)}));
    std::vector<cplx> v(static_cast<std::size_t>(n + 1));
    for (auto& x : v) x = {g(rng), g(rng)};
    const auto r = balance_residual(p, v);
    worst = std::max(worst, r.residual / r.scale);
  }
  return {worst <= 1e-12, "max residual/scale " + num(worst) + " over 1000 pairs"};
}

Outcome global_balance() {
  const std::vector<MultistepScheme> schemes{leapfrog1d(-1.0, 0.8), bdf2_1d(-1.0, 0.5), lf2d_v1(1.0, -1.0, 0.4, 0.4),
                                             lf2d_v2(1.0, -1.0, 0.8, 0.8)};
  double worst = 0.0;
  std::string detail;
  for (const auto& s : schemes) {
    const auto w = random_window(s, 64, static_cast<std::size_t>(s.s() + 2), 2);
    const double r = global_balance_check(s, w).residual;
    worst = std::max(worst, r);
    detail += s.name() + " " + num(r) + ", ";
  }
  return {worst <= 1e-11, detail + "limit 1e-11"};
}

Outcome leapfrog_conservation() {
  const double la = -0.8;
  const auto s = leapfrog1d(-1.0, 0.8);
  const int n = 128;
  ProblemSpec p{s, ProblemKind::cauchy_periodic, std::nullopt, 0, n - 1};
  p.dt = 0.8 / n;
  p.steps = 1000;
  const auto w0 = random_window(s, n, 2, 3);
  for (const auto& g : w0.levels()) {
    GridFunction f(0, n - 1, 1, p.dx(), true);
    for (int j = 0; j < n; ++j) f(j) = g(j);
    p.initial.push_back(std::move(f));
  }
  p.energy_trace = true;
  const auto r = run(p);
  const auto& e = r.energy.E0;
  double drift = 0.0;
  for (double x : e) drift = std::max(drift, std::abs(x - e.front()) / e.front());
  double closed = 0.0;
  auto compare = [&](const GridFunction& a, const GridFunction& b, double dft) {
    const std::vector<double> v0(a.values().begin(), a.values().end());
    const std::vector<double> v1(b.values().begin(), b.values().end());
    const double ref = oracle::leapfrog_energy(la, v0, v1, p.dx()[0]);
    closed = std::max(closed, std::abs(dft - ref) / ref);
  };
  compare(p.initial[0], p.initial[1], e.front());
  compare(r.final_window.level(0), r.final_window.level(1), e.back());
  const bool ok = !r.unstable && e.size() == 1001 && drift <= 1e-11 && closed <= 1e-11;
  return {ok, "max drift " + num(drift) + ", DFT vs local density " + num(closed) + " over 1000 steps"};
}

Outcome bdf2_roots() {
  const auto s = bdf2_1d(-1.0, 0.5);
  double worst = 0.0;
  for (double xi : {0.0, oracle::pi}) {
    auto roots = dispersion_roots(dispersion_polynomial(s, {{xi}}));
    if (roots.size() != 2) return {false, "expected two roots"};
    if (std::abs(roots[0] - 1.0) > std::abs(roots[1] - 1.0)) std::swap(roots[0], roots[1]);
    worst = std::max({worst, std::abs(roots[0] - 1.0), std::abs(roots[1] - 1.0 / 3.0)});
  }
  return {worst <= 1e-10, "max deviation from {1, 1/3} " + num(worst)};
}

Outcome von_neumann_thresholds() {
  Assumption1Options opt;
  opt.scan.n_grid = 256;
  opt.tol_disk = 1e-9;
  struct Family {
    const char* name;
    std::function<MultistepScheme(double)> make;
  };
  const std::vector<Family> fams{{"leapfrog1d", [](double c) { return leapfrog1d(-1.0, c); }},
                                 {"lf2d_v1", [](double c) { return lf2d_v1(1.0, 1.0, 0.5 * c, 0.5 * c); }},
                                 {"lf2d_v2", [](double c) { return lf2d_v2(1.0, 1.0, c, c); }}};
  bool ok = true;
  std::string detail;
  for (const auto& f : fams) {
    const bool below = check_assumption1(f.make(0.99), opt).pass;
    const bool above = check_assumption1(f.make(1.01), opt).pass;
    ok = ok && below && !above;
    detail += std::string(f.name) + (below ? " pass" : " fail") + "@0.99/" + (above ? "pass" : "fail") + "@1.01; ";
  }
  return {ok, detail + "256 points per axis"};
}

Outcome m_gap() {
  const std::vector<MultistepScheme> schemes{leapfrog1d(-1.0, 0.8), lf2d_v1(1.0, 1.0, 0.4, 0.4),
                                             lf2d_v2(1.0, 1.0, 0.8, 0.8)};
  std::string detail;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& s : schemes) {
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& eta : eta_grid(s.d(), 64)) {
      for (int k = 0; k < 256; ++k) {
        const auto cp = companion_pair(s, {std::polar(1.0, 2.0 * oracle::pi * k / 256), eta});
        for (const auto& kappa : cp.eigen_M) gap = std::min(gap, std::abs(std::abs(kappa) - 1.0));
      }
    }
    worst = std::min(worst, gap);
    detail += s.name() + " " + num(gap) + ", ";
  }
  return {worst > 1e-3, "min ||kappa| - 1| " + detail + "limit 1e-3"};
}

Outcome auxiliary() {
  const auto s = leapfrog1d(-1.0, 0.8);
  const auto r = auxiliary_run(s, 50, 1000, true);
  const auto r2 = auxiliary_run(s, 100, 2000, false);
  const double change = std::abs(r2.semigroup - r.semigroup) / r.semigroup;
  const bool ok = !r.run.unstable && r.run.energy.E0.size() == 1001 && r.max_increase <= 1e-12 &&
                  std::isfinite(r.semigroup) && change <= 0.2;
  return {ok, "max E0 increase " + num(r.max_increase) + ", semigroup " + num(r.semigroup) + " -> " +
                  num(r2.semigroup) + " (change " + num(change) + ")"};
}

Outcome superposition() {
  const auto lf = detail::superposition_run(leapfrog1d(-1.0, 0.8), 100, 500);
  const auto bd = detail::superposition_run(bdf2_1d(-1.0, 0.8), 100, 500);
  const bool ok = lf.relative <= 1e-10 && bd.relative <= 1e-9 && lf.levels >= 500 && bd.levels >= 500;
  return {ok, "leapfrog1d " + num(lf.relative) + " (limit 1e-10), bdf2_1d " + num(bd.relative) + " (limit 1e-9)"};
}

Outcome reflection() {
  const auto s = leapfrog1d(-1.0, 0.5);
  const auto r = reflection_run(s, 400);
  const auto r2 = reflection_run(s, 800);
  const bool norm_ok = std::abs(r.packet_ratio - 1.0) <= 0.1;
  const bool right = r.packet_velocity > 0.0;
  const bool refine = std::isfinite(r.semigroup) && r2.semigroup <= 1.01 * r.semigroup;
  return {norm_ok && right && refine, "packet/initial norm " + num(r.packet_ratio) + ", velocity " +
                                          num(r.packet_velocity) + ", semigroup " + num(r.semigroup) + " -> " +
                                          num(r2.semigroup) + " on refinement"};
}

Outcome trace_probe() {
  const auto s = leapfrog1d(-1.0, 0.8);
  TraceConstantOptions opt;
  opt.P1 = 1;
  opt.n_draws = 10000;
  opt.optimize_w = true;
  opt.pad = 1;
  const auto r = trace_constant_probe(s, opt);
  TraceConstantOptions ropt = opt;
  ropt.optimize_w = false;
  const auto rr = trace_constant_probe(s, ropt);
  return {r.last_decade_increase <= 0.05,
          "running max " + num(r.running_max) + ", last-decade increase " + num(r.last_decade_increase) +
              " (limit 0.05); random w: " + num(rr.running_max) + ", increase " + num(rr.last_decade_increase)};
}

}  // namespace

int main() {
  criterion(1, "energy-dissipation balance", 1.0, balance_identity);
  criterion(2, "global balance, four schemes", 5.0, global_balance);
  criterion(3, "leap-frog energy conservation", 5.0, leapfrog_conservation);
  criterion(4, "BDF2 roots at sin xi = 0", 0.0, bdf2_roots);
  criterion(5, "von Neumann thresholds", 0.0, von_neumann_thresholds);
  criterion(6, "M unit-circle gap", 5.0, m_gap);
  criterion(7, "auxiliary problem energy decay", 0.0, auxiliary);
  criterion(8, "superposition u = v + w", 0.0, superposition);
  criterion(9, "Dirichlet reflection", 10.0, reflection);
  criterion(10, "trace constant probe", 0.0, trace_probe);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
