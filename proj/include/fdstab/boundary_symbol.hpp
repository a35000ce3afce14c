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

/// Point (z, eta) of the Laplace-Fourier variables; eta has d - 1 entries.
struct LaplacePoint {
  cplx z;
  std::vector<double> eta;
};

/// a_{l1}(z, eta) = sum_sigma z^sigma sum_{l'} a_{(l1,l'),sigma} e^{i l' eta}, for l1 in [-r1, p1].
class BoundarySymbolTable {
 public:
  BoundarySymbolTable(const MultistepScheme& scheme, const std::vector<double>& eta)
      : r1_(scheme.r1()), p1_(scheme.p1()) {
    if (static_cast<int>(eta.size()) != scheme.d() - 1) {
      throw InvalidArgument("boundary symbols: eta must have d - 1 entries");
    }
    const double eta1 = eta.empty() ? 0.0 : eta[0];
    polys_.assign(static_cast<std::size_t>(r1_ + p1_ + 1),
                  Polynomial(std::vector<cplx>(static_cast<std::size_t>(scheme.s() + 2))));
    std::vector<std::vector<cplx>> c(polys_.size(), std::vector<cplx>(static_cast<std::size_t>(scheme.s() + 2)));
    for (int sigma = 0; sigma <= scheme.s() + 1; ++sigma) {
      for (const auto& t : scheme.taps(sigma)) {
        c[static_cast<std::size_t>(t.l1 + r1_)][static_cast<std::size_t>(sigma)] +=
            t.weight * std::polar(1.0, t.l2 * eta1);
      }
    }
    for (std::size_t k = 0; k < c.size(); ++k) polys_[k] = Polynomial(std::move(c[k]));
  }

  int r1() const { return r1_; }
  int p1() const { return p1_; }

  /// a_{l1}(., eta) as a polynomial in z.
  const Polynomial& poly(int l1) const {
    if (l1 < -r1_ || l1 > p1_) throw InvalidArgument("boundary symbols: l1 outside [-r1, p1]");
    return polys_[static_cast<std::size_t>(l1 + r1_)];
  }

  cplx a(int l1, cplx z) const { return poly(l1)(z); }
  cplx z_dz_a(int l1, cplx z) const { return z * poly(l1).derivative()(z); }

  /// Values a_{l1}(z) for l1 = -r1..p1.
  std::vector<cplx> values(cplx z) const {
    std::vector<cplx> out;
    for (const auto& p : polys_) out.push_back(p(z));
    return out;
  }
  /// Values z d/dz a_{l1}(z) for l1 = -r1..p1.
  std::vector<cplx> z_dz_values(cplx z) const {
    std::vector<cplx> out;
    for (const auto& p : polys_) out.push_back(z * p.derivative()(z));
    return out;
  }

 private:
  int r1_;
  int p1_;
  std::vector<Polynomial> polys_;
};

inline BoundarySymbolTable boundary_symbols(const MultistepScheme& scheme, const LaplacePoint& pt) {
  return BoundarySymbolTable(scheme, pt.eta);
}

struct CircleSplit {
  int stable = 0;     ///< |kappa| < 1 - band
  int unstable = 0;   ///< |kappa| > 1 + band
  int on_circle = 0;  ///< within the band
  double min_gap = std::numeric_limits<double>::infinity();
};

inline CircleSplit split_by_unit_circle(const std::vector<cplx>& ev, double band = 1e-8) {
  CircleSplit s;
  for (const auto& k : ev) {
    const double gap = std::abs(k) - 1.0;
    s.min_gap = std::min(s.min_gap, std::abs(gap));
    if (gap < -band) {
      ++s.stable;
    } else if (gap > band) {
      ++s.unstable;
    } else {
      ++s.on_circle;
    }
  }
  return s;
}

struct CompanionPair {
  Eigen::MatrixXcd L_mat;
  Eigen::MatrixXcd M_mat;
  std::vector<cplx> eigen_L;
  std::vector<cplx> eigen_M;
  CircleSplit split_L;
  CircleSplit split_M;
  cplx det_L;
  cplx det_M;
};

/// One-step transfer matrix of sum_{l1} c_{l1} w_{j+l1} = 0 in the unknowns
/// (w_{j+p1-1}, ..., w_{j-r1}): first row -c_{p1-1}/c_{p1}, ..., -c_{-r1}/c_{p1}.
inline Eigen::MatrixXcd spatial_companion(const std::vector<cplx>& c) {
  return companion_matrix(Polynomial(c));
}

struct CompanionOptions {
  double tol = 1e-12;   ///< relative guard on the leading symbols
  double band = 1e-8;   ///< on-circle classification band
};

inline CompanionPair companion_pair(const MultistepScheme& scheme, const LaplacePoint& pt,
                                    const CompanionOptions& opt = {}) {
  if (std::abs(pt.z) < 1.0 - 1e-14) throw PreconditionError("companion_pair: |z| must be >= 1");
  if (scheme.p1() + scheme.r1() == 0) throw PreconditionError("companion_pair: stencil has no j1 extent");
  const auto table = boundary_symbols(scheme, pt);
  const auto a = table.values(pt.z);
  const auto b = table.z_dz_values(pt.z);
  auto scale = [](const std::vector<cplx>& v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x));
    return m;
  };
  if (std::abs(a.back()) <= opt.tol * scale(a)) {
    throw PreconditionError("companion_pair: a_{p1}(z, eta) vanishes");
  }
  if (std::abs(b.back()) <= opt.tol * scale(b)) {
    throw PreconditionError("companion_pair: d/dz a_{p1}(z, eta) vanishes");
  }
  CompanionPair out;
  out.L_mat = spatial_companion(a);
  out.M_mat = spatial_companion(b);
  out.det_L = out.L_mat.determinant();
  out.det_M = out.M_mat.determinant();
  Eigen::MatrixXcd l = out.L_mat;
  Eigen::MatrixXcd m = out.M_mat;
  balance_matrix(l);
  balance_matrix(m);
  out.eigen_L = eigenvalues(l);
  out.eigen_M = eigenvalues(m);
  out.split_L = split_by_unit_circle(out.eigen_L, opt.band);
  out.split_M = split_by_unit_circle(out.eigen_M, opt.band);
  return out;
}

/// Uniform grid of n points on [0, 2 pi); a single empty eta when d = 1.
inline std::vector<std::vector<double>> eta_grid(int d, int n) {
  if (d == 1) return {{}};
  std::vector<std::vector<double>> out;
  for (int k = 0; k < n; ++k) out.push_back({2.0 * std::numbers::pi * k / n});
  return out;
}

struct Assumption2Options {
  double R = 2.0;
  int n_radius = 8;
  int n_arg = 64;
  int n_eta = 64;
  double tol = 1e-10;
};

/// a_{-r1} and a_{p1} have nonzero z-degree and do not vanish on |z| in [1, R].
inline Report check_assumption2(const MultistepScheme& scheme, const Assumption2Options& opt = {}) {
  if (!(opt.R > 1.0)) throw InvalidArgument("check_assumption2: R must exceed 1");
  Report rep;
  rep.check = "assumption2";
  rep.tolerances = {{"tol", opt.tol}, {"R", opt.R}};
  double min_lo = std::numeric_limits<double>::infinity();
  double min_hi = std::numeric_limits<double>::infinity();
  int min_degree = std::numeric_limits<int>::max();
  std::vector<double> worst_z;
  std::vector<double> worst_eta;
  double worst = std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  for (const auto& eta : eta_grid(scheme.d(), opt.n_eta)) {
    const BoundarySymbolTable table(scheme, eta);
    const Polynomial& lo = table.poly(-scheme.r1());
    const Polynomial& hi = table.poly(scheme.p1());
    min_degree = std::min({min_degree, lo.effective_degree(), hi.effective_degree()});
    for (int ir = 0; ir < opt.n_radius; ++ir) {
      const double rho = 1.0 + (opt.R - 1.0) * ir / std::max(1, opt.n_radius - 1);
      for (int ia = 0; ia < opt.n_arg; ++ia) {
        const cplx z = std::polar(rho, 2.0 * std::numbers::pi * ia / opt.n_arg);
        const double vlo = std::abs(lo(z));
        const double vhi = std::abs(hi(z));
        min_lo = std::min(min_lo, vlo);
        min_hi = std::min(min_hi, vhi);
        if (std::min(vlo, vhi) < worst) {
          worst = std::min(vlo, vhi);
          worst_z = {z.real(), z.imag()};
          worst_eta = eta;
        }
        ++n;
      }
    }
  }
  rep.n_samples = n;
  rep.worst_case["z"] = worst_z;
  if (!worst_eta.empty()) rep.worst_case["eta"] = worst_eta;
  rep.worst_value = worst;
  rep.metrics = {{"min_abs_a_minus_r1", min_lo},
                 {"min_abs_a_p1", min_hi},
                 {"min_z_degree", static_cast<double>(min_degree)}};
  const bool degree_ok = min_degree >= 1;
  const bool value_ok = worst > opt.tol;
  rep.pass = degree_ok && value_ok;
  if (!degree_ok) rep.notes.push_back("a boundary symbol has zero degree in z at some eta");
  if (!value_ok) rep.notes.push_back("a boundary symbol vanishes on the sampled region");
  if (!rep.pass) {
    rep.notes.push_back("warning: relaxed variants of this assumption are not attempted");
  }
  return rep;
}

struct GaussLucasOptions {
  int n_eta = 64;
  double tol = 1e-12;  ///< margin for open-disk membership and hull containment
};

/// Roots of a_{p1}(., eta), a_{-r1}(., eta) and of their z-derivatives lie in the open unit
/// disk, and derivative roots lie in the convex hull of the symbol's roots.
inline Report gauss_lucas_check(const MultistepScheme& scheme, const GaussLucasOptions& opt = {}) {
  Report rep;
  rep.check = "gauss_lucas";
  rep.tolerances = {{"tol", opt.tol}};
  double max_mod = 0.0;
  double max_hull = 0.0;
  bool zero_symbol = false;
  std::vector<double> worst_eta;
  std::size_t n = 0;
  for (const auto& eta : eta_grid(scheme.d(), opt.n_eta)) {
    const BoundarySymbolTable table(scheme, eta);
    for (int l1 : {scheme.p1(), -scheme.r1()}) {
      const Polynomial a = table.poly(l1).trimmed();
      if (a.size() == 0) {
        zero_symbol = true;
        worst_eta = eta;
        continue;
      }
      const auto roots = polynomial_roots(a);
      const Polynomial da = a.derivative().trimmed();
      const auto droots = da.size() >= 2 ? polynomial_roots(da) : std::vector<cplx>{};
      const double m = std::max(max_modulus(roots), max_modulus(droots));
      if (m > max_mod) {
        max_mod = m;
        worst_eta = eta;
      }
      for (const auto& x : droots) max_hull = std::max(max_hull, distance_to_convex_hull(roots, x));
      ++n;
    }
  }
  rep.n_samples = n;
  if (!worst_eta.empty()) rep.worst_case["eta"] = worst_eta;
  rep.worst_value = max_mod;
  rep.metrics = {{"max_root_modulus", max_mod}, {"max_hull_distance", max_hull}};
  rep.pass = !zero_symbol && max_mod < 1.0 - opt.tol && max_hull <= 1e-9;
  if (zero_symbol) rep.notes.push_back("a boundary symbol vanishes identically");
  if (max_mod >= 1.0 - opt.tol) rep.notes.push_back("a root leaves the open unit disk");
  if (max_hull > 1e-9) rep.notes.push_back("a derivative root lies outside the convex hull of the roots");
  return rep;
}

/// Finitely supported complex sequence: values[k] sits at index start + k.
struct CompactSequence {
  int start = 0;
  std::vector<cplx> values;

  int end() const { return start + static_cast<int>(values.size()) - 1; }
  cplx at(int j) const {
    return (j < start || j > end()) ? cplx{} : values[static_cast<std::size_t>(j - start)];
  }
};

struct TraceProbeResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool defined = false;  ///< false for the 0/0 case
};

struct TraceProbeOptions {
  double R0 = 2.0;
};

/// lhs = sum_{j=-r1-p1}^{P1} |w_j|^2,
/// rhs = sum_{j in Z} |sum_l a_l w_{j+l}|^2 + sum_{j <= 0} |sum_l z d/dz a_l w_{j+l}|^2.
inline TraceProbeResult trace_inequality_probe(const MultistepScheme& scheme, const LaplacePoint& pt,
                                               const CompactSequence& w, int P1,
                                               const TraceProbeOptions& opt = {}) {
  const double mod = std::abs(pt.z);
  if (!(mod > 1.0)) throw PreconditionError("trace probe: |z| must exceed 1");
  if (mod > opt.R0) throw PreconditionError("trace probe: |z| exceeds R0");
  const auto table = boundary_symbols(scheme, pt);
  const auto a = table.values(pt.z);
  const auto b = table.z_dz_values(pt.z);
  const int r1 = scheme.r1();
  const int p1 = scheme.p1();

  TraceProbeResult res;
  for (int j = -r1 - p1; j <= P1; ++j) res.lhs += std::norm(w.at(j));
  if (w.values.empty()) {
    res.ratio = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  for (int j = w.start - p1; j <= w.end() + r1; ++j) {
    cplx sa{};
    cplx sb{};
    for (int l = -r1; l <= p1; ++l) {
      const cplx wj = w.at(j + l);
      sa += a[static_cast<std::size_t>(l + r1)] * wj;
      sb += b[static_cast<std::size_t>(l + r1)] * wj;
    }
    res.rhs += std::norm(sa);
    if (j <= 0) res.rhs += std::norm(sb);
  }
  if (res.rhs > 0.0) {
    res.ratio = res.lhs / res.rhs;
    res.defined = true;
  } else if (res.lhs == 0.0) {
    res.ratio = std::numeric_limits<double>::quiet_NaN();
  } else {
    res.ratio = std::numeric_limits<double>::infinity();
    res.defined = true;
  }
  return res;
}

struct TraceConstantOptions {
  int P1 = 1;
  long n_draws = 10000;
  std::uint64_t seed = 20140901;
  double R0 = 2.0;
  /// Random w: support length drawn uniformly from [1, max_support].
  int max_support = 8;
  /// Replace the random w by the maximizer of lhs/rhs over sequences supported on
  /// [-r1 - p1 - pad, P1 + pad]; then only (z, eta) are random.
  bool optimize_w = false;
  int pad = 2;
};

struct TraceConstantResult {
  double running_max = 0.0;
  /// (draw count, running max) at 10, 100, 1000, ... and n_draws.
  std::vector<std::pair<long, double>> history;
  LaplacePoint argmax;
  CompactSequence argmax_w;
  /// Relative increase of the running max over the last decade of draws.
  double last_decade_increase = 0.0;
};

/// Sequence with support [start, start + len) maximizing lhs/rhs at `pt`: the top
/// eigenvector of the pencil (A, B), where lhs = w^* A w and rhs = w^* B w.
inline CompactSequence trace_maximizer(const MultistepScheme& scheme, const LaplacePoint& pt, int start,
                                       int len, int P1) {
  if (len < 1) throw InvalidArgument("trace maximizer: support length must be >= 1");
  const auto table = boundary_symbols(scheme, pt);
  const auto a = table.values(pt.z);
  const auto b = table.z_dz_values(pt.z);
  const int r1 = scheme.r1();
  const int p1 = scheme.p1();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(len, len);
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(len, len);
  for (int k = 0; k < len; ++k) {
    const int j = start + k;
    if (j >= -r1 - p1 && j <= P1) A(k, k) = 1.0;
  }
  for (int j = start - p1; j <= start + len - 1 + r1; ++j) {
    Eigen::RowVectorXcd ra = Eigen::RowVectorXcd::Zero(len);
    Eigen::RowVectorXcd rb = Eigen::RowVectorXcd::Zero(len);
    for (int l = -r1; l <= p1; ++l) {
      const int k = j + l - start;
      if (k < 0 || k >= len) continue;
      ra(k) = a[static_cast<std::size_t>(l + r1)];
      rb(k) = b[static_cast<std::size_t>(l + r1)];
    }
    B += ra.adjoint() * ra;
    if (j <= 0) B += rb.adjoint() * rb;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, B);
  if (es.info() != Eigen::Success) throw SingularOperatorError("trace maximizer: rhs form is not definite");
  const Eigen::VectorXcd v = es.eigenvectors().col(len - 1);
  CompactSequence w{start, {}};
  for (int k = 0; k < len; ++k) w.values.push_back(v(k));
  return w;
}

/// Monte-Carlo estimate of the trace constant: running max of lhs/rhs over random
/// (z, eta, w) with 1 < |z| <= R0 and w supported near the boundary band.
inline TraceConstantResult trace_constant_probe(const MultistepScheme& scheme,
                                                const TraceConstantOptions& opt = {}) {
  if (opt.n_draws < 1) throw InvalidArgument("trace constant probe: n_draws must be >= 1");
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> len_dist(1, opt.max_support);
  const int lo = -scheme.r1() - scheme.p1();
  std::uniform_int_distribution<int> start_dist(lo - opt.max_support + 1, opt.P1);

  TraceConstantResult res;
  long next_mark = 10;
  for (long k = 1; k <= opt.n_draws; ++k) {
    // rho in (1, R0]: 1 - u with u in [0, 1) maps onto (0, 1].
    const double rho = 1.0 + (opt.R0 - 1.0) * (1.0 - unit(rng));
    LaplacePoint pt{std::polar(rho, 2.0 * std::numbers::pi * unit(rng)), {}};
    for (int i = 1; i < scheme.d(); ++i) pt.eta.push_back(2.0 * std::numbers::pi * unit(rng));
    CompactSequence w;
    if (opt.optimize_w) {
      w = trace_maximizer(scheme, pt, lo - opt.pad, opt.P1 - lo + 1 + 2 * opt.pad, opt.P1);
    } else {
      w.start = start_dist(rng);
      const int len = len_dist(rng);
      for (int i = 0; i < len; ++i) w.values.emplace_back(gauss(rng), gauss(rng));
    }
    const auto probe = trace_inequality_probe(scheme, pt, w, opt.P1, {opt.R0});
    if (probe.defined && probe.ratio > res.running_max) {
      res.running_max = probe.ratio;
      res.argmax = pt;
      res.argmax_w = w;
    }
    if (k == next_mark || k == opt.n_draws) {
      res.history.emplace_back(k, res.running_max);
      if (k == next_mark) next_mark *= 10;
    }
  }
  if (res.history.size() >= 2) {
    const double prev = res.history[res.history.size() - 2].second;
    const double last = res.history.back().second;
    res.last_decade_increase = prev > 0.0 ? (last - prev) / prev : std::numeric_limits<double>::infinity();
  }
  return res;
}

}  // namespace fdstab
