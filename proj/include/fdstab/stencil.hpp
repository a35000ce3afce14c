#pragma once

#include <span>
#include <string>
#include <vector>

#include "fdstab/errors.hpp"
#include "fdstab/grid.hpp"
#include "fdstab/scheme.hpp"

namespace fdstab {

/// How an interior operator treats reads past the ends of an open j1 axis.
enum class EdgeMode {
  /// Output only where the whole footprint is inside the box ([j_min + r1, j_max - p1]).
  shrink,
  /// Output on the same box; values outside are taken as zero ghosts.
  zero,
};

namespace detail {

inline GridFunction output_box(const GridFunction& g, int r1, int p1, EdgeMode mode) {
  if (g.periodic1() || mode == EdgeMode::zero) return GridFunction::zeros_like(g);
  const int lo = g.j_min() + r1;
  const int hi = g.j_max() - p1;
  if (hi < lo) {
    throw InvalidArgument("stencil: box [" + std::to_string(g.j_min()) + ", " +
                          std::to_string(g.j_max()) + "] too small for the stencil footprint");
  }
  return GridFunction(lo, hi, g.n2(), g.dx(), false);
}

/// out += weight * Q g
inline void accumulate(std::span<const Tap> taps, double weight, const GridFunction& g,
                       GridFunction& out) {
  if (weight == 0.0) return;
  for (int j1 = out.j_min(); j1 <= out.j_max(); ++j1) {
    for (int j2 = 0; j2 < out.n2(); ++j2) {
      double acc = 0.0;
      for (const auto& t : taps) acc += t.weight * g.value_or_zero(j1 + t.l1, j2 + t.l2);
      out(j1, j2) += weight * acc;
    }
  }
}

inline void check_scheme_matches(const MultistepScheme& scheme, const GridFunction& g) {
  if (g.d() != scheme.d()) throw InvalidArgument("stencil: grid dimension differs from scheme");
}

/// sum_sigma weights[sigma] * Q_sigma w^{n+sigma}
inline GridFunction apply_weighted(const MultistepScheme& scheme, const StateWindow& w,
                                   std::span<const double> weights, EdgeMode mode) {
  const auto levels = static_cast<std::size_t>(scheme.s() + 2);
  check_scheme_matches(scheme, w.level(0));
  auto out = output_box(w.level(0), scheme.r1(), scheme.p1(), mode);
  for (std::size_t sigma = 0; sigma < levels; ++sigma) {
    accumulate(scheme.taps(static_cast<int>(sigma)), weights[sigma], w.level(sigma), out);
  }
  return out;
}

}  // namespace detail

/// Q_sigma g = sum_l a_{l,sigma} S^l g.
inline GridFunction apply_Q(const MultistepScheme& scheme, int sigma, const GridFunction& g,
                            EdgeMode mode = EdgeMode::shrink) {
  if (sigma < 0 || sigma > scheme.s() + 1) {
    throw InvalidArgument("apply_Q: sigma " + std::to_string(sigma) + " outside [0, s+1]");
  }
  detail::check_scheme_matches(scheme, g);
  auto out = detail::output_box(g, scheme.r1(), scheme.p1(), mode);
  detail::accumulate(scheme.taps(sigma), 1.0, g, out);
  return out;
}

/// L w = sum_sigma Q_sigma w^{n+sigma}; the window carries s+2 levels.
inline GridFunction apply_L(const MultistepScheme& scheme, const StateWindow& w,
                            EdgeMode mode = EdgeMode::shrink) {
  w.require_size(static_cast<std::size_t>(scheme.s() + 2), "apply_L");
  std::vector<double> weights(static_cast<std::size_t>(scheme.s() + 2), 1.0);
  return detail::apply_weighted(scheme, w, weights, mode);
}

/// Multiplier M w = sum_sigma sigma Q_sigma w^{n+sigma}.
inline GridFunction apply_M(const MultistepScheme& scheme, const StateWindow& w,
                            EdgeMode mode = EdgeMode::shrink) {
  w.require_size(static_cast<std::size_t>(scheme.s() + 2), "apply_M");
  std::vector<double> weights(static_cast<std::size_t>(scheme.s() + 2));
  for (std::size_t sigma = 0; sigma < weights.size(); ++sigma) weights[sigma] = static_cast<double>(sigma);
  return detail::apply_weighted(scheme, w, weights, mode);
}

/// Left-hand side of the boundary row j1:
///   u_{j1,.}^{n+s+1} + sum_sigma B_{j1,sigma} u_{1,.}^{n+sigma},
/// returned on the single-slice box {j1} x transverse.
inline GridFunction apply_boundary(const BoundaryStencilSet& bcs, const StateWindow& w, int j1) {
  if (j1 < 1 - bcs.r1() || j1 > 0) {
    throw InvalidArgument("apply_boundary: j1 " + std::to_string(j1) + " outside [1-r1, 0]");
  }
  w.require_size(static_cast<std::size_t>(bcs.s() + 2), "apply_boundary");
  const auto& g0 = w.level(0);
  if (g0.d() != bcs.d()) throw InvalidArgument("apply_boundary: grid dimension differs");
  if (!g0.periodic1() && (!g0.contains(j1) || !g0.contains(1) || !g0.contains(1 + bcs.q1()))) {
    throw InvalidArgument("apply_boundary: box does not cover the boundary footprint");
  }
  GridFunction out(j1, j1, g0.n2(), g0.dx(), false);
  const auto& newest = w.level(static_cast<std::size_t>(bcs.s() + 1));
  for (int j2 = 0; j2 < out.n2(); ++j2) {
    double acc = newest.value_or_zero(j1, j2);
    for (int sigma = 0; sigma <= bcs.s() + 1; ++sigma) {
      const auto& level = w.level(static_cast<std::size_t>(sigma));
      for (const auto& t : bcs.taps(j1, sigma)) acc += t.weight * level.value_or_zero(1 + t.l1, j2 + t.l2);
    }
    out(j1, j2) = acc;
  }
  return out;
}

}  // namespace fdstab
