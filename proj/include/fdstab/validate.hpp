#pragma once

#include <cmath>
#include <limits>

#include "fdstab/report.hpp"
#include "fdstab/scheme.hpp"
#include "fdstab/symbol.hpp"

namespace fdstab {

struct ValidationOptions {
  int n_grid = 0;  ///< points per axis; 0 selects 256 (d = 1) or 64 (d = 2)
  double tol = 1e-8;
};

/// Solvability of the top layer (min |Q_{s+1}^(e^{i xi})| over a grid) and range tightness.
inline Report validate_scheme(const MultistepScheme& scheme, const ValidationOptions& opt = {}) {
  Report rep;
  rep.check = "assumption0";
  rep.tolerances = {{"tol", opt.tol}};
  FrequencyScanOptions scan;
  scan.n_grid = opt.n_grid;
  scan.n_random = 0;
  const auto samples = frequency_samples(scheme.d(), scan.grid_for(scheme.d()), 0, 0);
  rep.n_samples = samples.size();
  double min_mod = std::numeric_limits<double>::infinity();
  for (const auto& f : samples) {
    const auto p = dispersion_polynomial(scheme, f);
    const double m = std::abs(p[static_cast<std::size_t>(scheme.s() + 1)]);
    if (m < min_mod) {
      min_mod = m;
      rep.worst_case["xi"] = f.xi;
    }
  }
  rep.worst_value = min_mod;
  const bool tight = scheme.is_tight();
  rep.metrics = {{"min_abs_top_symbol", min_mod}, {"tight_range", tight ? 1.0 : 0.0}};
  const bool solvable = min_mod > opt.tol;
  if (!solvable) rep.notes.push_back("Q_{s+1} symbol vanishes: the implicit step is not invertible");
  if (!tight) rep.notes.push_back("declared stencil range is not tight");
  rep.pass = solvable && tight;
  return rep;
}

}  // namespace fdstab
