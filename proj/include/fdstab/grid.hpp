#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fdstab/errors.hpp"

namespace fdstab {

/// Pairwise (cascade) summation; error grows like O(log n) instead of O(n).
inline double pairwise_sum(std::span<const double> x) {
  constexpr std::size_t kBlock = 32;
  if (x.size() <= kBlock) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

/// Real grid function on {j_min..j_max} x Z/n2Z.
///
/// The first axis is either open (a finite window of a half-line or the whole
/// line) or periodic; the transverse axis, when d = 2, is always periodic.
/// Norms use mesh-volume weights: |||g|||^2 = dx1 * dx2 * sum |g_j|^2.
class GridFunction {
 public:
  GridFunction() = default;

  GridFunction(int j_min, int j_max, int n2, std::vector<double> dx, bool periodic1 = false)
      : j_min_(j_min), j_max_(j_max), n2_(n2), dx_(std::move(dx)), periodic1_(periodic1) {
    if (j_max_ < j_min_) throw InvalidArgument("grid: empty index box");
    if (dx_.empty() || dx_.size() > 2) throw InvalidArgument("grid: dx must have 1 or 2 entries");
    if (n2_ < 1) throw InvalidArgument("grid: transverse size must be >= 1");
    if (dx_.size() == 1 && n2_ != 1) throw InvalidArgument("grid: d = 1 requires n2 = 1");
    for (double h : dx_) {
      if (!(h > 0.0)) throw InvalidArgument("grid: mesh sizes must be positive");
    }
    values_.assign(static_cast<std::size_t>(n1()) * static_cast<std::size_t>(n2_), 0.0);
  }

  /// Same layout as `other`, filled with zeros.
  static GridFunction zeros_like(const GridFunction& other) {
    return GridFunction(other.j_min_, other.j_max_, other.n2_, other.dx_, other.periodic1_);
  }

  int d() const { return static_cast<int>(dx_.size()); }
  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  int n1() const { return j_max_ - j_min_ + 1; }
  int n2() const { return n2_; }
  bool periodic1() const { return periodic1_; }
  const std::vector<double>& dx() const { return dx_; }
  double transverse_volume() const { return dx_.size() == 2 ? dx_[1] : 1.0; }
  double cell_volume() const { return dx_[0] * transverse_volume(); }
  bool contains(int j1) const { return j1 >= j_min_ && j1 <= j_max_; }

  double& operator()(int j1, int j2 = 0) { return values_[offset(j1, j2)]; }
  double operator()(int j1, int j2 = 0) const { return values_[offset(j1, j2)]; }

  /// Value with periodic wrap where the axis is periodic and zero outside an open box.
  double value_or_zero(int j1, int j2) const {
    if (periodic1_) {
      j1 = j_min_ + wrap(j1 - j_min_, n1());
    } else if (!contains(j1)) {
      return 0.0;
    }
    return values_[static_cast<std::size_t>(j1 - j_min_) * n2_ + wrap(j2, n2_)];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  /// |||g|||^2 over the whole box.
  double norm2() const { return norm2(j_min_, j_max_); }

  /// |||g|||^2_{m1,m2}, restricted to the part of [m1, m2] inside the box.
  double norm2(int m1, int m2) const {
    const int lo = std::max(m1, j_min_);
    const int hi = std::min(m2, j_max_);
    if (hi < lo) return 0.0;
    std::vector<double> sq;
    sq.reserve(static_cast<std::size_t>(hi - lo + 1) * n2_);
    for (int j1 = lo; j1 <= hi; ++j1) {
      for (int j2 = 0; j2 < n2_; ++j2) {
        const double v = (*this)(j1, j2);
        sq.push_back(v * v);
      }
    }
    return cell_volume() * pairwise_sum(sq);
  }

  /// ||g_{j1,.}||^2 in l2(Z^{d-1}) (zero outside the box).
  double slice_norm2(int j1) const {
    if (!contains(j1)) return 0.0;
    double acc = 0.0;
    for (int j2 = 0; j2 < n2_; ++j2) acc += (*this)(j1, j2) * (*this)(j1, j2);
    return transverse_volume() * acc;
  }

  /// Weighted inner product <f, g> over the common box.
  double dot(const GridFunction& other) const {
    require_same_layout(other);
    std::vector<double> prod(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) prod[i] = values_[i] * other.values_[i];
    return cell_volume() * pairwise_sum(prod);
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  bool same_layout(const GridFunction& o) const {
    return j_min_ == o.j_min_ && j_max_ == o.j_max_ && n2_ == o.n2_ && dx_ == o.dx_ &&
           periodic1_ == o.periodic1_;
  }

  void require_same_layout(const GridFunction& o) const {
    if (!same_layout(o)) throw InvalidArgument("grid: layouts differ");
  }

  GridFunction& operator+=(const GridFunction& o) {
    require_same_layout(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  GridFunction& operator-=(const GridFunction& o) {
    require_same_layout(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  GridFunction& operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
  }
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(double c, GridFunction a) { return a *= c; }

  /// Copy onto a different box, filling new cells with zero.
  GridFunction resized(int j_min, int j_max) const {
    GridFunction out(j_min, j_max, n2_, dx_, periodic1_);
    for (int j1 = std::max(j_min, j_min_); j1 <= std::min(j_max, j_max_); ++j1) {
      for (int j2 = 0; j2 < n2_; ++j2) out(j1, j2) = (*this)(j1, j2);
    }
    return out;
  }

  void fill(const std::function<double(int, int)>& fn) {
    for (int j1 = j_min_; j1 <= j_max_; ++j1) {
      for (int j2 = 0; j2 < n2_; ++j2) (*this)(j1, j2) = fn(j1, j2);
    }
  }

  static int wrap(int i, int n) {
    const int m = i % n;
    return m < 0 ? m + n : m;
  }

 private:
  std::size_t offset(int j1, int j2) const {
    return static_cast<std::size_t>(j1 - j_min_) * static_cast<std::size_t>(n2_) +
           static_cast<std::size_t>(j2);
  }

  int j_min_ = 0;
  int j_max_ = -1;
  int n2_ = 1;
  std::vector<double> dx_{1.0};
  bool periodic1_ = false;
  std::vector<double> values_;
};

/// Consecutive time levels (u^n, u^{n+1}, ...) sharing one box and mesh.
class StateWindow {
 public:
  StateWindow() = default;

  explicit StateWindow(std::vector<GridFunction> levels, long base_index = 0)
      : levels_(std::move(levels)), base_index_(base_index) {
    if (levels_.empty()) throw InvalidArgument("window: no levels");
    for (const auto& g : levels_) levels_.front().require_same_layout(g);
  }

  std::size_t size() const { return levels_.size(); }
  long base_index() const { return base_index_; }
  const GridFunction& level(std::size_t k) const { return levels_.at(k); }
  GridFunction& level(std::size_t k) { return levels_.at(k); }
  const std::vector<GridFunction>& levels() const { return levels_; }

  void require_size(std::size_t expected, const char* what) const {
    if (levels_.size() != expected) {
      throw InvalidArgument(std::string(what) + ": window must have " + std::to_string(expected) +
                            " levels, got " + std::to_string(levels_.size()));
    }
  }

  /// Levels [first, first + count) as a new window.
  StateWindow slice(std::size_t first, std::size_t count) const {
    if (first + count > levels_.size()) throw InvalidArgument("window: slice out of range");
    return StateWindow({levels_.begin() + static_cast<long>(first),
                        levels_.begin() + static_cast<long>(first + count)},
                       base_index_ + static_cast<long>(first));
  }

  /// Drop the oldest level and append `next`.
  void shift_in(GridFunction next) {
    levels_.front().require_same_layout(next);
    levels_.erase(levels_.begin());
    levels_.push_back(std::move(next));
    ++base_index_;
  }

  double norm2_sum() const {
    double acc = 0.0;
    for (const auto& g : levels_) acc += g.norm2();
    return acc;
  }

 private:
  std::vector<GridFunction> levels_;
  long base_index_ = 0;
};

}  // namespace fdstab
