#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "fdstab/errors.hpp"

namespace fdstab {

/// Integer multi-index (l1) or (l1, l2). Only d = 1 and d = 2 are supported.
class MultiIndex {
 public:
  MultiIndex() = default;

  MultiIndex(std::initializer_list<int> components)
      : MultiIndex(std::vector<int>(components)) {}

  explicit MultiIndex(const std::vector<int>& components) {
    if (components.empty() || components.size() > 2) {
      throw InvalidArgument("MultiIndex: dimension must be 1 or 2, got " +
                            std::to_string(components.size()));
    }
    dim_ = static_cast<int>(components.size());
    std::copy(components.begin(), components.end(), c_.begin());
  }

  int dim() const { return dim_; }
  int operator[](std::size_t i) const { return c_[i]; }
  int first() const { return c_[0]; }
  /// Transverse component; 0 when d = 1.
  int second() const { return dim_ == 2 ? c_[1] : 0; }

  std::vector<int> to_vector() const { return {c_.begin(), c_.begin() + dim_}; }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.dim_ == b.dim_ && a.c_ == b.c_;
  }

 private:
  std::array<int, 2> c_{0, 0};
  int dim_ = 0;
};

/// One interior coefficient a_{l,sigma}.
struct StencilEntry {
  MultiIndex l;
  int sigma = 0;
  double a = 0.0;
};

/// One boundary coefficient b_{l,j1,sigma}.
struct BoundaryEntry {
  MultiIndex l;
  int j1 = 0;
  int sigma = 0;
  double b = 0.0;
};

/// Nonzero stencil weight at offset (l1, l2).
struct Tap {
  int l1 = 0;
  int l2 = 0;
  double weight = 0.0;
};

/// Constant-coefficient multistep scheme
///   sum_{sigma=0}^{s+1} Q_sigma u^{n+sigma} = 0,  Q_sigma = sum_l a_{l,sigma} S^l.
///
/// Coefficients are stored densely over [-r, p] x [0, s+1]. Instances are
/// immutable once built.
class MultistepScheme {
 public:
  MultistepScheme(int s, MultiIndex p, MultiIndex r, std::vector<double> lambda,
                  std::span<const StencilEntry> entries, std::string name = {})
      : d_(p.dim()), s_(s), p_(p), r_(r), lambda_(std::move(lambda)), name_(std::move(name)) {
    if (s_ < 0) throw InvalidArgument("scheme: s must be >= 0");
    if (r_.dim() != d_) throw InvalidArgument("scheme: p and r dimensions differ");
    for (int i = 0; i < d_; ++i) {
      if (p_[i] < 0 || r_[i] < 0) throw InvalidArgument("scheme: p and r must be nonnegative");
    }
    if (static_cast<int>(lambda_.size()) != d_) {
      throw InvalidArgument("scheme: lambda must have d entries");
    }
    for (double l : lambda_) {
      if (!(l > 0.0) || !std::isfinite(l)) throw InvalidArgument("scheme: lambda must be positive");
    }
    w1_ = p_[0] + r_[0] + 1;
    w2_ = d_ == 2 ? p_[1] + r_[1] + 1 : 1;
    coeffs_.assign(static_cast<std::size_t>(w1_ * w2_ * (s_ + 2)), 0.0);
    std::vector<char> seen(coeffs_.size(), 0);
    for (const auto& e : entries) {
      if (e.l.dim() != d_) throw InvalidArgument("scheme: coefficient index has wrong dimension");
      if (e.sigma < 0 || e.sigma > s_ + 1) {
        throw InvalidArgument("scheme: sigma " + std::to_string(e.sigma) + " outside [0, s+1]");
      }
      if (!in_range(e.l.first(), e.l.second())) {
        throw InvalidArgument("scheme: coefficient offset outside [-r, p]");
      }
      if (!std::isfinite(e.a)) throw InvalidArgument("scheme: non-finite coefficient");
      const auto k = index(e.l.first(), e.l.second(), e.sigma);
      if (seen[k]) throw InvalidArgument("scheme: duplicate coefficient entry");
      seen[k] = 1;
      coeffs_[k] = e.a;
    }
    taps_.resize(static_cast<std::size_t>(s_ + 2));
    for (int sigma = 0; sigma <= s_ + 1; ++sigma) {
      for (int l1 = -r_[0]; l1 <= p_[0]; ++l1) {
        for (int l2 = -r2(); l2 <= p2(); ++l2) {
          const double a = coeffs_[index(l1, l2, sigma)];
          if (a != 0.0) taps_[sigma].push_back({l1, l2, a});
        }
      }
    }
    if (taps_[s_ + 1].empty()) throw InvalidArgument("scheme: the sigma = s+1 layer is identically zero");
  }

  int d() const { return d_; }
  int s() const { return s_; }
  const MultiIndex& p() const { return p_; }
  const MultiIndex& r() const { return r_; }
  int p1() const { return p_[0]; }
  int r1() const { return r_[0]; }
  int p2() const { return d_ == 2 ? p_[1] : 0; }
  int r2() const { return d_ == 2 ? r_[1] : 0; }
  const std::vector<double>& lambda() const { return lambda_; }
  const std::string& name() const { return name_; }

  /// a_{l,sigma}; zero outside the stored box.
  double a(int l1, int l2, int sigma) const {
    if (sigma < 0 || sigma > s_ + 1 || !in_range(l1, l2)) return 0.0;
    return coeffs_[index(l1, l2, sigma)];
  }
  double a(const MultiIndex& l, int sigma) const { return a(l.first(), l.second(), sigma); }

  /// Nonzero taps of Q_sigma.
  std::span<const Tap> taps(int sigma) const {
    if (sigma < 0 || sigma > s_ + 1) {
      throw InvalidArgument("sigma " + std::to_string(sigma) + " outside [0, s+1]");
    }
    return taps_[sigma];
  }

  /// Q_{s+1} is the identity.
  bool is_explicit() const {
    const auto& top = taps_[s_ + 1];
    return top.size() == 1 && top[0].l1 == 0 && top[0].l2 == 0 && top[0].weight == 1.0;
  }

  /// Every declared extreme offset carries at least one nonzero coefficient.
  bool is_tight() const {
    auto column_nonzero = [&](int axis, int offset) {
      for (int sigma = 0; sigma <= s_ + 1; ++sigma) {
        for (const auto& t : taps_[sigma]) {
          if ((axis == 0 ? t.l1 : t.l2) == offset) return true;
        }
      }
      return false;
    };
    for (int axis = 0; axis < d_; ++axis) {
      if (!column_nonzero(axis, p_[axis]) || !column_nonzero(axis, -r_[axis])) return false;
    }
    return true;
  }

  std::vector<StencilEntry> entries() const {
    std::vector<StencilEntry> out;
    for (int sigma = 0; sigma <= s_ + 1; ++sigma) {
      for (const auto& t : taps_[sigma]) {
        out.push_back({d_ == 2 ? MultiIndex{t.l1, t.l2} : MultiIndex{t.l1}, sigma, t.weight});
      }
    }
    return out;
  }

 private:
  bool in_range(int l1, int l2) const {
    return l1 >= -r_[0] && l1 <= p_[0] && l2 >= -r2() && l2 <= p2();
  }
  std::size_t index(int l1, int l2, int sigma) const {
    return static_cast<std::size_t>((sigma * w1_ + (l1 + r_[0])) * w2_ + (l2 + r2()));
  }

  int d_;
  int s_;
  MultiIndex p_;
  MultiIndex r_;
  std::vector<double> lambda_;
  std::string name_;
  int w1_ = 0;
  int w2_ = 0;
  std::vector<double> coeffs_;
  std::vector<std::vector<Tap>> taps_;
};

/// Numerical boundary operators B_{j1,sigma} = sum_l b_{l,j1,sigma} S^l with
/// l1 in [0, q1], l' in [-q', q'], j1 in [1-r1, 0], sigma in [0, s+1].
class BoundaryStencilSet {
 public:
  BoundaryStencilSet(const MultistepScheme& scheme, MultiIndex q,
                     std::span<const BoundaryEntry> entries)
      : d_(scheme.d()), s_(scheme.s()), r1_(scheme.r1()), q_(q) {
    if (q_.dim() != d_) throw InvalidArgument("boundary: q has wrong dimension");
    for (int i = 0; i < d_; ++i) {
      if (q_[i] < 0) throw InvalidArgument("boundary: q must be nonnegative");
    }
    taps_.resize(static_cast<std::size_t>(std::max(r1_, 0) * (s_ + 2)));
    for (const auto& e : entries) {
      if (e.l.dim() != d_) throw InvalidArgument("boundary: coefficient index has wrong dimension");
      if (e.j1 < 1 - r1_ || e.j1 > 0) {
        throw InvalidArgument("boundary: j1 " + std::to_string(e.j1) + " outside [1-r1, 0]");
      }
      if (e.sigma < 0 || e.sigma > s_ + 1) throw InvalidArgument("boundary: sigma outside [0, s+1]");
      if (e.l.first() < 0 || e.l.first() > q_[0] || std::abs(e.l.second()) > q2()) {
        throw InvalidArgument("boundary: coefficient offset outside the declared q range");
      }
      if (!std::isfinite(e.b)) throw InvalidArgument("boundary: non-finite coefficient");
      auto& row = taps_[slot(e.j1, e.sigma)];
      for (const auto& t : row) {
        if (t.l1 == e.l.first() && t.l2 == e.l.second()) {
          throw InvalidArgument("boundary: duplicate coefficient entry");
        }
      }
      if (e.b != 0.0) row.push_back({e.l.first(), e.l.second(), e.b});
    }
  }

  /// Homogeneous Dirichlet rows u_{j1} = g_{j1} (all b = 0).
  static BoundaryStencilSet dirichlet(const MultistepScheme& scheme) {
    std::vector<int> zeros(static_cast<std::size_t>(scheme.d()), 0);
    return BoundaryStencilSet(scheme, MultiIndex(zeros), {});
  }

  int d() const { return d_; }
  int s() const { return s_; }
  int r1() const { return r1_; }
  const MultiIndex& q() const { return q_; }
  int q1() const { return q_[0]; }
  int q2() const { return d_ == 2 ? q_[1] : 0; }

  std::span<const Tap> taps(int j1, int sigma) const {
    if (j1 < 1 - r1_ || j1 > 0) throw InvalidArgument("boundary: j1 outside the boundary band");
    if (sigma < 0 || sigma > s_ + 1) throw InvalidArgument("boundary: sigma outside [0, s+1]");
    return taps_[slot(j1, sigma)];
  }

  double b(int l1, int l2, int j1, int sigma) const {
    for (const auto& t : taps(j1, sigma)) {
      if (t.l1 == l1 && t.l2 == l2) return t.weight;
    }
    return 0.0;
  }

  std::vector<BoundaryEntry> entries() const {
    std::vector<BoundaryEntry> out;
    for (int j1 = 1 - r1_; j1 <= 0; ++j1) {
      for (int sigma = 0; sigma <= s_ + 1; ++sigma) {
        for (const auto& t : taps(j1, sigma)) {
          out.push_back({d_ == 2 ? MultiIndex{t.l1, t.l2} : MultiIndex{t.l1}, j1, sigma, t.weight});
        }
      }
    }
    return out;
  }

 private:
  std::size_t slot(int j1, int sigma) const {
    return static_cast<std::size_t>((j1 - (1 - r1_)) * (s_ + 2) + sigma);
  }

  int d_;
  int s_;
  int r1_;
  MultiIndex q_;
  std::vector<std::vector<Tap>> taps_;
};

}  // namespace fdstab
