#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fdstab/errors.hpp"
#include "fdstab/poly.hpp"
#include "fdstab/report.hpp"
#include "fdstab/scheme.hpp"

namespace fdstab {

/// xi in R^d, read mod 2 pi.
struct FrequencyPoint {
  std::vector<double> xi;
};

/// Coefficients c_sigma = Q_sigma^(e^{i xi}) of the dispersion relation sum_sigma c_sigma z^sigma = 0.
using DispersionPolynomial = Polynomial;

/// Q_sigma^(kappa) = sum_l a_{l,sigma} kappa^l for arbitrary nonzero kappa in C^d.
inline cplx symbol_value(const MultistepScheme& scheme, int sigma, cplx kappa1, cplx kappa2 = 1.0) {
  cplx acc{};
  for (const auto& t : scheme.taps(sigma)) {
    acc += t.weight * std::pow(kappa1, t.l1) * (t.l2 == 0 ? cplx{1.0} : std::pow(kappa2, t.l2));
  }
  return acc;
}

inline DispersionPolynomial dispersion_polynomial(const MultistepScheme& scheme, const FrequencyPoint& f) {
  if (static_cast<int>(f.xi.size()) != scheme.d()) {
    throw InvalidArgument("dispersion_polynomial: frequency has wrong dimension");
  }
  std::vector<cplx> c(static_cast<std::size_t>(scheme.s() + 2));
  for (int sigma = 0; sigma <= scheme.s() + 1; ++sigma) {
    cplx acc{};
    for (const auto& t : scheme.taps(sigma)) {
      double phase = t.l1 * f.xi[0];
      if (scheme.d() == 2) phase += t.l2 * f.xi[1];
      acc += t.weight * std::polar(1.0, phase);
    }
    c[static_cast<std::size_t>(sigma)] = acc;
  }
  return Polynomial(std::move(c));
}

inline std::vector<cplx> dispersion_roots(const DispersionPolynomial& p) { return polynomial_roots(p); }

/// Companion ("amplification") matrix of the one-step recurrence in Fourier space.
inline Eigen::MatrixXcd amplification_matrix(const DispersionPolynomial& p) {
  const int n = p.nominal_degree();
  if (n < 1) throw DegenerateDegreeError("amplification matrix: polynomial has no time levels");
  const cplx lead = p[static_cast<std::size_t>(n)];
  if (std::abs(lead) <= 1e-13 * p.max_abs_coeff()) {
    throw DegenerateDegreeError("amplification matrix: Q_{s+1} symbol vanishes");
  }
  return companion_matrix(p);
}

/// Deterministic frequency samples: a uniform grid (n_grid points per axis, 2 pi k / n_grid)
/// followed by n_random uniform draws on [0, 2 pi)^d.
inline std::vector<FrequencyPoint> frequency_samples(int d, int n_grid, int n_random, std::uint64_t seed) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<FrequencyPoint> out;
  if (d == 1) {
    for (int k = 0; k < n_grid; ++k) out.push_back({{two_pi * k / n_grid}});
  } else {
    for (int k1 = 0; k1 < n_grid; ++k1) {
      for (int k2 = 0; k2 < n_grid; ++k2) out.push_back({{two_pi * k1 / n_grid, two_pi * k2 / n_grid}});
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, two_pi);
  for (int k = 0; k < n_random; ++k) {
    FrequencyPoint f;
    for (int i = 0; i < d; ++i) f.xi.push_back(u(rng));
    out.push_back(std::move(f));
  }
  return out;
}

struct FrequencyScanOptions {
  int n_grid = 0;  ///< points per axis; 0 selects 256 (d = 1) or 64 (d = 2)
  int n_random = 256;
  std::uint64_t seed = 20140901;

  int grid_for(int d) const { return n_grid > 0 ? n_grid : (d == 1 ? 256 : 64); }
};

struct Assumption1Options {
  FrequencyScanOptions scan;
  double tol_disk = 1e-9;
  double tol_sep = 1e-6;
};

/// Von Neumann condition with simple roots, sampled over xi.
inline Report check_assumption1(const MultistepScheme& scheme, const Assumption1Options& opt = {}) {
  Report rep;
  rep.check = "assumption1";
  rep.seed = opt.scan.seed;
  rep.tolerances = {{"tol_disk", opt.tol_disk}, {"tol_sep", opt.tol_sep}};
  const auto samples = frequency_samples(scheme.d(), opt.scan.grid_for(scheme.d()), opt.scan.n_random, opt.scan.seed);
  rep.n_samples = samples.size();

  double worst_mod = 0.0;
  double worst_sep = std::numeric_limits<double>::infinity();
  std::vector<double> xi_mod;
  std::vector<double> xi_sep;
  bool degenerate = false;
  for (const auto& f : samples) {
    std::vector<cplx> roots;
    try {
      roots = dispersion_roots(dispersion_polynomial(scheme, f));
    } catch (const DegenerateDegreeError&) {
      if (!degenerate) rep.notes.push_back("Q_{s+1} symbol vanishes at a sampled frequency");
      degenerate = true;
      xi_mod = f.xi;
      worst_mod = std::numeric_limits<double>::infinity();
      continue;
    }
    const double m = max_modulus(roots);
    const double sep = min_separation(roots);
    if (m > worst_mod) {
      worst_mod = m;
      xi_mod = f.xi;
    }
    if (sep < worst_sep) {
      worst_sep = sep;
      xi_sep = f.xi;
    }
  }
  const bool disk_ok = worst_mod <= 1.0 + opt.tol_disk;
  const bool sep_ok = worst_sep >= opt.tol_sep;
  rep.pass = disk_ok && sep_ok && !degenerate;
  rep.metrics = {{"max_root_modulus", worst_mod}, {"min_root_separation", worst_sep}};
  if (!disk_ok || sep_ok) {
    rep.worst_case["xi"] = xi_mod;
    rep.worst_value = worst_mod;
  } else {
    rep.worst_case["xi"] = xi_sep;
    rep.worst_value = worst_sep;
  }
  if (!disk_ok) rep.notes.push_back("dispersion roots leave the closed unit disk");
  if (!sep_ok) rep.notes.push_back("dispersion roots are not simple");
  return rep;
}

/// Spectral (2-)norm of a small complex matrix.
inline double operator_norm(const Eigen::MatrixXcd& a) {
  if (a.size() == 1) return std::abs(a(0, 0));
  const Eigen::MatrixXcd h = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

struct PowerBoundOptions {
  FrequencyScanOptions scan{.n_grid = 0, .n_random = 0, .seed = 20140901};
  long n_max = 10000;
  double overflow_threshold = 1e150;
};

struct PowerBoundResult {
  double c1_estimate = 0.0;  ///< max over samples and 0 <= n <= n_max of ||A^n||
  std::vector<double> argmax_xi;
  long argmax_n = 0;
  bool overflow = false;
  long overflow_n = -1;
  /// (n, max over sampled xi of ||A^n||) at n = 1, 2, 4, ... and n_max.
  std::vector<std::pair<long, double>> history;
  /// Least-squares slope of log max_xi ||A^n|| against n over the second half of the history.
  double log_growth_rate = 0.0;
};

/// Uniform power boundedness of the amplification matrix, by repeated multiplication.
inline PowerBoundResult power_bound_probe(const MultistepScheme& scheme, const PowerBoundOptions& opt = {}) {
  PowerBoundResult res;
  res.c1_estimate = 1.0;  // n = 0
  const auto samples =
      frequency_samples(scheme.d(), opt.scan.grid_for(scheme.d()), opt.scan.n_random, opt.scan.seed);
  std::vector<long> marks;
  for (long n = 1; n < opt.n_max; n *= 2) marks.push_back(n);
  marks.push_back(opt.n_max);
  std::vector<double> at_mark(marks.size(), 0.0);
  long reached = opt.n_max;

  for (const auto& f : samples) {
    const Eigen::MatrixXcd a = amplification_matrix(dispersion_polynomial(scheme, f));
    Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
    std::size_t mark = 0;
    for (long n = 1; n <= opt.n_max; ++n) {
      power = a * power;
      const double nrm = operator_norm(power);
      if (!std::isfinite(nrm) || nrm > opt.overflow_threshold) {
        res.overflow = true;
        if (res.overflow_n < 0 || n < res.overflow_n) res.overflow_n = n;
        reached = std::min(reached, n - 1);
        break;
      }
      if (nrm > res.c1_estimate) {
        res.c1_estimate = nrm;
        res.argmax_xi = f.xi;
        res.argmax_n = n;
      }
      if (mark < marks.size() && n == marks[mark]) {
        at_mark[mark] = std::max(at_mark[mark], nrm);
        ++mark;
      }
    }
  }
  for (std::size_t k = 0; k < marks.size(); ++k) {
    if (marks[k] <= reached) res.history.emplace_back(marks[k], at_mark[k]);
  }
  if (res.overflow) res.c1_estimate = std::numeric_limits<double>::infinity();

  // Growth rate from the last half of the recorded history (log-spaced marks).
  if (res.history.size() >= 2) {
    const std::size_t first = res.history.size() / 2 == res.history.size() - 1 ? 0 : res.history.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double cnt = 0;
    for (std::size_t k = first; k < res.history.size(); ++k) {
      const double x = static_cast<double>(res.history[k].first);
      const double y = std::log(std::max(res.history[k].second, 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      cnt += 1;
    }
    const double den = cnt * sxx - sx * sx;
    res.log_growth_rate = den > 0 ? (cnt * sxy - sx * sy) / den : 0.0;
  }
  return res;
}

}  // namespace fdstab
