#pragma once

#include <random>
#include <vector>

#include "fdstab/fdstab.hpp"
#include "oracles.hpp"

namespace support {

using fdstab::GridFunction;
using fdstab::MultistepScheme;
using fdstab::StateWindow;

inline oracle::Field to_field(const GridFunction& g) {
  return {g.j_min(), g.n1(), g.n2(), g.periodic1(), {g.values().begin(), g.values().end()}};
}

/// Coefficient table read back from the scheme's entry list.
inline oracle::Table to_table(const MultistepScheme& s) {
  oracle::Table t;
  for (const auto& e : s.entries()) t[{e.l.first(), e.l.second(), e.sigma}] = e.a;
  return t;
}

inline GridFunction random_grid(std::mt19937_64& rng, int j_min, int j_max, int n2, std::vector<double> dx,
                                bool periodic) {
  std::normal_distribution<double> g(0.0, 1.0);
  GridFunction out(j_min, j_max, n2, std::move(dx), periodic);
  for (double& v : out.values()) v = g(rng);
  return out;
}

/// Random periodic window of `levels` levels on an n-point grid per axis.
inline StateWindow random_periodic_window(const MultistepScheme& s, int n, std::size_t levels, std::uint64_t seed,
                                          double dt = 0.01) {
  std::mt19937_64 rng(seed);
  std::vector<double> dx;
  for (double l : s.lambda()) dx.push_back(dt / l);
  std::vector<GridFunction> lv;
  for (std::size_t k = 0; k < levels; ++k) lv.push_back(random_grid(rng, 0, n - 1, s.d() == 2 ? n : 1, dx, true));
  return StateWindow(std::move(lv));
}

inline double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  a.require_same_layout(b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

}  // namespace support
