#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fdstab/errors.hpp"
#include "fdstab/fourier.hpp"
#include "fdstab/grid.hpp"
#include "fdstab/poly.hpp"
#include "fdstab/scheme.hpp"
#include "fdstab/stencil.hpp"
#include "fdstab/symbol.hpp"

namespace fdstab {

/// Lagrange-type basis P_k = a prod_{j != k} (X - x_j) at the simple roots x_k of P.
struct InterpolationBasis {
  std::vector<cplx> roots;
  cplx lead;
  std::vector<Polynomial> basis;
};

inline InterpolationBasis interpolation_basis(const Polynomial& p, double tol_sep = 1e-6) {
  const int n = p.nominal_degree();
  if (n < 1) throw DegenerateDegreeError("interpolation basis: polynomial must have degree >= 1");
  InterpolationBasis out;
  out.roots = polynomial_roots(p);
  out.lead = p[static_cast<std::size_t>(n)];
  const double sep = min_separation(out.roots);
  if (sep < tol_sep) {
    throw MultipleRootError("interpolation basis: roots are not simple (separation " + std::to_string(sep) + ")");
  }
  for (std::size_t k = 0; k < out.roots.size(); ++k) {
    std::vector<cplx> others;
    for (std::size_t j = 0; j < out.roots.size(); ++j) {
      if (j != k) others.push_back(out.roots[j]);
    }
    out.basis.push_back(Polynomial::from_roots(others, out.lead));
  }

  Polynomial sum(std::vector<cplx>(static_cast<std::size_t>(n), 0.0));
  for (const auto& b : out.basis) sum = sum + b;
  const Polynomial dp = p.derivative();
  double err = 0.0;
  for (std::size_t i = 0; i < sum.size(); ++i) err = std::max(err, std::abs(sum[i] - dp[i]));
  if (err > 1e-10 * std::max(1.0, dp.max_abs_coeff())) {
    throw Error("interpolation basis: sum of basis polynomials differs from P' by " + std::to_string(err));
  }
  return out;
}

/// Matrices of q_e and q_d in the coordinates (w^0, ..., w^s): q(w) = w^* Q w.
struct HermitianFormPair {
  Eigen::MatrixXcd Qe;
  Eigen::MatrixXcd Qd;
};

/// q_e(w) = sum_k alpha_k |P_k(T) w|^2, q_d(w) = sum_k alpha_k (1 - |x_k|^2) |P_k(T) w|^2.
/// An empty alpha means alpha_k = 1, i.e. the multiplier P'.
inline HermitianFormPair mode_forms(const InterpolationBasis& b, const std::vector<double>& alpha = {}) {
  const auto m = static_cast<Eigen::Index>(b.roots.size());
  if (!alpha.empty() && alpha.size() != b.roots.size()) {
    throw InvalidArgument("mode_forms: alpha must have one weight per root");
  }
  HermitianFormPair f{Eigen::MatrixXcd::Zero(m, m), Eigen::MatrixXcd::Zero(m, m)};
  for (std::size_t k = 0; k < b.roots.size(); ++k) {
    const double w = alpha.empty() ? 1.0 : alpha[k];
    Eigen::VectorXcd v(m);
    for (Eigen::Index i = 0; i < m; ++i) v(i) = b.basis[k][static_cast<std::size_t>(i)];
    const Eigen::MatrixXcd outer = v.conjugate() * v.transpose();
    f.Qe += w * outer;
    f.Qd += w * (1.0 - std::norm(b.roots[k])) * outer;
  }
  // Symmetrize away round-off.
  f.Qe = 0.5 * (f.Qe + f.Qe.adjoint()).eval();
  f.Qd = 0.5 * (f.Qd + f.Qd.adjoint()).eval();
  return f;
}

inline double hermitian_form(const Eigen::MatrixXcd& q, const Eigen::VectorXcd& w) {
  return (w.adjoint() * q * w)(0, 0).real();
}

struct BalanceResidual {
  double residual = 0.0;
  double scale = 0.0;
};

/// Residual of 2 Re(conj(T Q(T) v) P(T) v) = (sum alpha) |P(T) v|^2 + q_e(v^1..) - q_e(v^0..) + q_d(v^0..)
/// at n = 0, with Q = sum_k alpha_k P_k (Q = P' by default).
inline BalanceResidual balance_residual(const Polynomial& p, const std::vector<cplx>& v,
                                        const std::vector<double>& alpha = {}, double tol_sep = 1e-6) {
  const int n = p.nominal_degree();
  if (static_cast<int>(v.size()) < n + 1) {
    throw InvalidArgument("balance_residual: sequence must have at least s+2 terms");
  }
  const auto basis = interpolation_basis(p, tol_sep);
  const auto forms = mode_forms(basis, alpha);
  double alpha_sum = 0.0;
  Polynomial q(std::vector<cplx>(static_cast<std::size_t>(n), 0.0));
  for (std::size_t k = 0; k < basis.basis.size(); ++k) {
    const double w = alpha.empty() ? 1.0 : alpha[k];
    alpha_sum += w;
    q = q + cplx{w} * basis.basis[k];
  }
  cplx pv{};
  for (int m = 0; m <= n; ++m) pv += p[static_cast<std::size_t>(m)] * v[static_cast<std::size_t>(m)];
  cplx tqv{};
  for (int m = 0; m < n; ++m) tqv += q[static_cast<std::size_t>(m)] * v[static_cast<std::size_t>(m + 1)];
  const Eigen::VectorXcd w0 = Eigen::Map<const Eigen::VectorXcd>(v.data(), n);
  const Eigen::VectorXcd w1 = Eigen::Map<const Eigen::VectorXcd>(v.data() + 1, n);
  const double lhs = 2.0 * (std::conj(tqv) * pv).real();
  const double e0 = hermitian_form(forms.Qe, w0);
  const double e1 = hermitian_form(forms.Qe, w1);
  const double d0 = hermitian_form(forms.Qd, w0);
  const double rhs = alpha_sum * std::norm(pv) + e1 - e0 + d0;
  return {std::abs(lhs - rhs), std::abs(lhs) + alpha_sum * std::norm(pv) + e1 + e0 + std::abs(d0)};
}

struct EnergyValue {
  double E0 = 0.0;
  double D0 = 0.0;
  double imag_residue = 0.0;  ///< |Im| of the mode sums, relative to their magnitude
};

/// E0 and D0 on a fixed periodic box, with per-mode forms computed once.
class EnergyFunctional {
 public:
  EnergyFunctional(const MultistepScheme& scheme, int n1, int n2, std::vector<double> dx,
                   std::vector<double> alpha = {}, double tol_sep = 1e-6)
      : s_(scheme.s()), d_(scheme.d()), dx_(std::move(dx)), fourier_(n1, n2) {
    if (static_cast<int>(dx_.size()) != d_) throw InvalidArgument("energy: dx must have d entries");
    forms_.reserve(fourier_.size());
    for (std::size_t k = 0; k < fourier_.size(); ++k) {
      const FrequencyPoint f{fourier_.xi(k, d_)};
      try {
        forms_.push_back(mode_forms(interpolation_basis(dispersion_polynomial(scheme, f), tol_sep), alpha));
      } catch (const MultipleRootError& e) {
        std::string where = "xi = (" + std::to_string(f.xi[0]);
        if (d_ == 2) where += ", " + std::to_string(f.xi[1]);
        throw MultipleRootError(std::string(e.what()) + " at " + where + ")");
      }
    }
  }

  std::size_t n_modes() const { return forms_.size(); }
  const HermitianFormPair& form(std::size_t mode) const { return forms_.at(mode); }
  const PeriodicFourier& fourier() const { return fourier_; }

  /// E0, D0 of the s+1 levels in `w`.
  EnergyValue evaluate(const StateWindow& w) const {
    w.require_size(static_cast<std::size_t>(s_ + 1), "energy");
    std::vector<std::vector<cplx>> hats;
    for (const auto& g : w.levels()) {
      if (g.dx() != dx_) throw InvalidArgument("energy: mesh differs from the functional's");
      hats.push_back(fourier_.forward(g));
    }
    std::vector<double> e(forms_.size());
    std::vector<double> dd(forms_.size());
    double imag = 0.0;
    double mag = 0.0;
    std::vector<cplx> v(static_cast<std::size_t>(s_ + 1));
    for (std::size_t k = 0; k < forms_.size(); ++k) {
      for (int m = 0; m <= s_; ++m) v[static_cast<std::size_t>(m)] = hats[static_cast<std::size_t>(m)][k];
      const cplx ek = quadratic_form(forms_[k].Qe, v);
      const cplx dk = quadratic_form(forms_[k].Qd, v);
      e[k] = ek.real();
      dd[k] = dk.real();
      imag += std::abs(ek.imag()) + std::abs(dk.imag());
      mag += std::abs(ek) + std::abs(dk);
    }
    const double weight = w.level(0).cell_volume() / static_cast<double>(forms_.size());
    return {weight * pairwise_sum(e), weight * pairwise_sum(dd), mag > 0.0 ? imag / mag : 0.0};
  }

  /// min over modes of the smallest eigenvalue of Qe.
  double min_qe_eigenvalue() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& f : forms_) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(f.Qe, Eigen::EigenvaluesOnly);
      m = std::min(m, es.eigenvalues()(0));
    }
    return m;
  }

 private:
  static cplx quadratic_form(const Eigen::MatrixXcd& Q, const std::vector<cplx>& v) {
    cplx acc = 0.0;
    for (Eigen::Index a = 0; a < Q.rows(); ++a) {
      cplx row = 0.0;
      for (Eigen::Index b = 0; b < Q.cols(); ++b) row += Q(a, b) * v[static_cast<std::size_t>(b)];
      acc += std::conj(v[static_cast<std::size_t>(a)]) * row;
    }
    return acc;
  }

  int s_;
  int d_;
  std::vector<double> dx_;
  PeriodicFourier fourier_;
  std::vector<HermitianFormPair> forms_;
};

inline EnergyValue global_energy(const MultistepScheme& scheme, const StateWindow& w,
                                 const std::vector<double>& alpha = {}) {
  const auto& g = w.level(0);
  return EnergyFunctional(scheme, g.n1(), g.n2(), g.dx(), alpha).evaluate(w);
}

struct GlobalBalance {
  double residual = 0.0;  ///< relative to scale
  double lhs = 0.0;       ///< 2 <Mv, Lv>
  double rhs = 0.0;       ///< (s+1)|||Lv|||^2 + E0(shifted) - E0 + D0
  double scale = 0.0;
};

/// Physical-space 2<Mv, Lv> against the Fourier-space forms, on s+2 periodic levels.
inline GlobalBalance global_balance_check(const MultistepScheme& scheme, const StateWindow& w,
                                          const EnergyFunctional& energy) {
  w.require_size(static_cast<std::size_t>(scheme.s() + 2), "global_balance_check");
  if (!w.level(0).periodic1()) throw InvalidArgument("global_balance_check: box must be periodic");
  const auto lv = apply_L(scheme, w);
  const auto mv = apply_M(scheme, w);
  const auto s1 = static_cast<std::size_t>(scheme.s() + 1);
  const auto before = energy.evaluate(w.slice(0, s1));
  const auto after = energy.evaluate(w.slice(1, s1));
  GlobalBalance out;
  out.lhs = 2.0 * mv.dot(lv);
  const double l2 = lv.norm2();
  out.rhs = static_cast<double>(scheme.s() + 1) * l2 + after.E0 - before.E0 + before.D0;
  out.scale = std::abs(out.lhs) + static_cast<double>(scheme.s() + 1) * l2 + after.E0 + before.E0 +
              std::abs(before.D0);
  out.residual = out.scale > 0.0 ? std::abs(out.lhs - out.rhs) / out.scale : 0.0;
  return out;
}

inline GlobalBalance global_balance_check(const MultistepScheme& scheme, const StateWindow& w) {
  const auto& g = w.level(0);
  return global_balance_check(scheme, w, EnergyFunctional(scheme, g.n1(), g.n2(), g.dx()));
}

struct CoercivityResult {
  double c_min = 0.0;         ///< min over modes of lambda_min(Qe)
  double c_random = 0.0;      ///< min of E0 / sum |||levels|||^2 over random windows
  std::vector<double> argmin_xi;
  bool root_collision = false;
};

struct CoercivityOptions {
  int n_grid = 0;  ///< modes per axis; 0 selects 256 (d = 1) or 64 (d = 2)
  int n_trials = 32;
  std::uint64_t seed = 20140901;
  double tol_sep = 1e-6;
};

inline CoercivityResult coercivity_probe(const MultistepScheme& scheme, const CoercivityOptions& opt = {}) {
  CoercivityResult res;
  const int n = opt.n_grid > 0 ? opt.n_grid : (scheme.d() == 1 ? 256 : 64);
  const int n2 = scheme.d() == 2 ? n : 1;
  std::vector<double> dx(scheme.lambda().size());
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = 1.0 / scheme.lambda()[i];

  const PeriodicFourier modes(n, n2);
  res.c_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const FrequencyPoint f{modes.xi(k, scheme.d())};
    double m = 0.0;
    try {
      const auto forms = mode_forms(interpolation_basis(dispersion_polynomial(scheme, f), opt.tol_sep));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(forms.Qe, Eigen::EigenvaluesOnly);
      m = es.eigenvalues()(0);
    } catch (const MultipleRootError&) {
      res.root_collision = true;
      m = 0.0;
    }
    if (m < res.c_min) {
      res.c_min = m;
      res.argmin_xi = f.xi;
    }
  }
  if (res.root_collision) {
    res.c_random = 0.0;
    return res;
  }

  const EnergyFunctional energy(scheme, n, n2, dx, {}, opt.tol_sep);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  res.c_random = std::numeric_limits<double>::infinity();
  for (int t = 0; t < opt.n_trials; ++t) {
    std::vector<GridFunction> levels;
    for (int m = 0; m <= scheme.s(); ++m) {
      GridFunction g(0, n - 1, n2, dx, true);
      for (double& v : g.values()) v = gauss(rng);
      levels.push_back(std::move(g));
    }
    const StateWindow w(std::move(levels));
    res.c_random = std::min(res.c_random, energy.evaluate(w).E0 / w.norm2_sum());
  }
  return res;
}

/// Local density form of the leap-frog energy:
///   2 sum dx (v0_j)^2 + 2 sum dx (v1_j)^2 + 2 lambda a sum dx (v0_{j+1} - v0_{j-1}) v1_j.
inline double leapfrog_local_energy(double lambda_a, const GridFunction& v0, const GridFunction& v1) {
  v0.require_same_layout(v1);
  std::vector<double> cross;
  cross.reserve(static_cast<std::size_t>(v0.n1()));
  for (int j = v0.j_min(); j <= v0.j_max(); ++j) {
    cross.push_back((v0.value_or_zero(j + 1, 0) - v0.value_or_zero(j - 1, 0)) * v1(j));
  }
  return 2.0 * v0.norm2() + 2.0 * v1.norm2() + 2.0 * lambda_a * v0.cell_volume() * pairwise_sum(cross);
}

/// True when n has no prime factor above 5.
inline bool fft_friendly(int n) {
  for (int p : {2, 3, 5}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

/// Zero-padded copy of an open-axis function on a periodic box of at least
/// max(factor * n1, n1 + 2 * margin) cells, rounded up to a 5-smooth size; the original cells keep their indices.
inline GridFunction periodic_embedding(const GridFunction& g, int margin, int factor = 4) {
  if (g.periodic1()) return g;
  int n = std::max(factor * g.n1(), g.n1() + 2 * margin);
  while (!fft_friendly(n)) ++n;
  const int extra = n - g.n1();
  const int lo = g.j_min() - extra / 2;
  GridFunction out(lo, lo + n - 1, g.n2(), g.dx(), true);
  for (int j1 = g.j_min(); j1 <= g.j_max(); ++j1) {
    for (int j2 = 0; j2 < g.n2(); ++j2) out(j1, j2) = g(j1, j2);
  }
  return out;
}

}  // namespace fdstab
