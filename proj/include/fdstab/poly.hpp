#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "fdstab/errors.hpp"

namespace fdstab {

using cplx = std::complex<double>;

/// Complex polynomial with coefficients in ascending powers: c[0] + c[1] z + ...
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {}

  /// a * prod_k (z - roots[k])
  static Polynomial from_roots(const std::vector<cplx>& roots, cplx lead = 1.0) {
    std::vector<cplx> c{lead};
    for (const auto& x : roots) {
      std::vector<cplx> next(c.size() + 1, 0.0);
      for (std::size_t i = 0; i < c.size(); ++i) {
        next[i + 1] += c[i];
        next[i] -= x * c[i];
      }
      c = std::move(next);
    }
    return Polynomial(std::move(c));
  }

  const std::vector<cplx>& coeffs() const { return c_; }
  std::size_t size() const { return c_.size(); }
  cplx operator[](std::size_t i) const { return i < c_.size() ? c_[i] : cplx{}; }

  /// Nominal degree (size - 1), independent of whether the top coefficient vanishes.
  int nominal_degree() const { return static_cast<int>(c_.size()) - 1; }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Drop trailing coefficients with |c| <= rel_tol * max|c|.
  Polynomial trimmed(double rel_tol = 1e-14) const {
    const double cut = rel_tol * max_abs_coeff();
    std::size_t n = c_.size();
    while (n > 0 && std::abs(c_[n - 1]) <= cut) --n;
    return Polynomial({c_.begin(), c_.begin() + static_cast<long>(n)});
  }

  /// Degree after trimming; -1 for the zero polynomial.
  int effective_degree(double rel_tol = 1e-14) const {
    return static_cast<int>(trimmed(rel_tol).size()) - 1;
  }

  cplx operator()(cplx z) const {
    cplx acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return Polynomial(std::vector<cplx>{});
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
    return Polynomial(std::move(d));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<cplx> c(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
    return Polynomial(std::move(c));
  }

  friend Polynomial operator*(cplx k, const Polynomial& a) {
    auto c = a.c_;
    for (auto& v : c) v *= k;
    return Polynomial(std::move(c));
  }

 private:
  std::vector<cplx> c_;
};

/// Parlett-Reinsch diagonal balancing (radix 2), in place. Eigenvalues are unchanged.
inline void balance_matrix(Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  constexpr double radix = 2.0;
  bool done = false;
  for (int sweep = 0; !done && sweep < 100; ++sweep) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

/// Companion matrix of the monic normalization of p, in the "first row" form
///   [-c_{n-1}/c_n ... -c_0/c_n; I 0].
inline Eigen::MatrixXcd companion_matrix(const Polynomial& p) {
  const int n = p.nominal_degree();
  if (n < 1) throw DegenerateDegreeError("companion matrix of a constant polynomial");
  const cplx lead = p[static_cast<std::size_t>(n)];
  if (lead == cplx{}) throw DegenerateDegreeError("companion matrix: leading coefficient is zero");
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) a(0, k) = -p[static_cast<std::size_t>(n - 1 - k)] / lead;
  for (int k = 1; k < n; ++k) a(k, k - 1) = 1.0;
  return a;
}

inline std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& a) {
  if (a.rows() == 0) return {};
  if (a.rows() == 1) return {a(0, 0)};
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, false);
  if (solver.info() != Eigen::Success) throw Error("eigenvalue iteration did not converge");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// All nominal_degree() roots of p, as eigenvalues of the balanced companion matrix.
/// Throws DegenerateDegreeError if |c_top| <= degenerate_tol * max|c|.
inline std::vector<cplx> polynomial_roots(const Polynomial& p, double degenerate_tol = 1e-13) {
  const int n = p.nominal_degree();
  if (n < 0) throw DegenerateDegreeError("roots of an empty polynomial");
  const double scale = p.max_abs_coeff();
  if (scale == 0.0) throw DegenerateDegreeError("roots of the zero polynomial");
  if (std::abs(p[static_cast<std::size_t>(n)]) <= degenerate_tol * scale) {
    throw DegenerateDegreeError("leading coefficient vanishes (|c_" + std::to_string(n) +
                                "| = " + std::to_string(std::abs(p[static_cast<std::size_t>(n)])) + ")");
  }
  if (n == 0) return {};
  if (n == 1) return {-p[0] / p[1]};
  Eigen::MatrixXcd a = companion_matrix(p);
  balance_matrix(a);
  return eigenvalues(a);
}

/// Smallest pairwise distance; +inf for fewer than two points.
inline double min_separation(const std::vector<cplx>& x) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) m = std::min(m, std::abs(x[i] - x[j]));
  }
  return m;
}

inline double max_modulus(const std::vector<cplx>& x) {
  double m = 0.0;
  for (const auto& v : x) m = std::max(m, std::abs(v));
  return m;
}

/// Distance from p to the convex hull of `pts` (0 when inside).
inline double distance_to_convex_hull(std::vector<cplx> pts, cplx p) {
  if (pts.empty()) return std::numeric_limits<double>::infinity();
  auto cross = [](cplx o, cplx a, cplx b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
  };
  auto seg_dist = [](cplx a, cplx b, cplx q) {
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(q - a);
    double t = ((q - a) * std::conj(ab)).real() / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(q - (a + t * ab));
  };
  std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  // Andrew's monotone chain.
  std::vector<cplx> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& q : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], q) <= 0.0) --k;
    hull[k++] = q;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 1 ? k - 1 : k);
  if (hull.size() == 1) return std::abs(p - hull[0]);
  double dist = std::numeric_limits<double>::infinity();
  bool inside = hull.size() >= 3;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const cplx a = hull[i];
    const cplx b = hull[(i + 1) % hull.size()];
    dist = std::min(dist, seg_dist(a, b, p));
    if (cross(a, b, p) < 0.0) inside = false;
  }
  return inside ? 0.0 : dist;
}

}  // namespace fdstab
