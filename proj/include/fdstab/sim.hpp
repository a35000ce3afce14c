#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "fdstab/energy.hpp"
#include "fdstab/errors.hpp"
#include "fdstab/fourier.hpp"
#include "fdstab/grid.hpp"
#include "fdstab/scheme.hpp"
#include "fdstab/stencil.hpp"
#include "fdstab/symbol.hpp"

namespace fdstab {

enum class ProblemKind {
  cauchy_periodic,  ///< every row is interior, periodic box
  ibvp_halfline,    ///< interior rows j1 >= 1, boundary rows u + B u_1 = g on [1-r1, 0]
  auxiliary,        ///< interior rows j1 >= 1, rows M u = g on every j1 <= 0 in the box
};

inline std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::cauchy_periodic: return "cauchy_periodic";
    case ProblemKind::ibvp_halfline: return "ibvp_halfline";
    case ProblemKind::auxiliary: return "auxiliary";
  }
  return "?";
}

/// Source value at time level n and cell (j1, j2).
using Source = std::function<double(long n, int j1, int j2)>;

struct ProblemSpec {
  MultistepScheme scheme;
  ProblemKind kind = ProblemKind::cauchy_periodic;
  std::optional<BoundaryStencilSet> bcs;  ///< ibvp_halfline only; Dirichlet when empty
  int j_min = 0;
  int j_max = 0;
  int n2 = 1;
  double dt = 0.1;
  long steps = 0;
  std::vector<GridFunction> initial;  ///< f^0..f^s on the box; empty means zero data
  Source interior;                    ///< F, interior rows read dt * F^{n+s+1}
  Source boundary;                    ///< g at the boundary rows
  bool monitor_tail = true;
  double tail_tol = 1e-8;
  long trajectory_stride = 0;  ///< 0 keeps no trajectory
  bool energy_trace = false;
  double overflow_threshold = 1e150;

  /// dx_i = dt / lambda_i.
  std::vector<double> dx() const {
    std::vector<double> out;
    for (double l : scheme.lambda()) out.push_back(dt / l);
    return out;
  }

  GridFunction zero_level() const {
    return GridFunction(j_min, j_max, n2, dx(), kind == ProblemKind::cauchy_periodic);
  }

  /// Cells on which the solution norm |||u|||^2 is measured.
  int norm_lo() const { return kind == ProblemKind::ibvp_halfline ? 1 - scheme.r1() : j_min; }

  void validate() const {
    if (!(dt > 0.0) || dt > 1.0) throw InvalidArgument("problem: dt must lie in (0, 1]");
    if (steps < 0) throw InvalidArgument("problem: steps must be >= 0");
    if (scheme.d() == 1 && n2 != 1) throw InvalidArgument("problem: d = 1 requires n2 = 1");
    if (j_max < j_min) throw InvalidArgument("problem: empty box");
    if (kind == ProblemKind::ibvp_halfline && j_min != 1 - scheme.r1()) {
      throw InvalidArgument("problem: half-line box must start at j1 = 1 - r1");
    }
    if (kind == ProblemKind::auxiliary && j_min > 1 - scheme.r1()) {
      throw InvalidArgument("problem: auxiliary box must contain [1 - r1, 0]");
    }
    if (kind != ProblemKind::cauchy_periodic && j_max < 1) {
      throw InvalidArgument("problem: box must contain interior cells");
    }
    if (bcs && kind != ProblemKind::ibvp_halfline) {
      throw InvalidArgument("problem: boundary stencils apply to the half-line problem only");
    }
    if (!initial.empty()) {
      if (initial.size() != static_cast<std::size_t>(scheme.s() + 1)) {
        throw InvalidArgument("problem: initial data must have s+1 levels");
      }
      const auto z = zero_level();
      for (const auto& g : initial) z.require_same_layout(g);
    }
  }
};

/// Width of the edge band watched for truncation.
inline int monitor_band(const MultistepScheme& scheme) { return 2 * (scheme.p1() + scheme.r1()) + 2; }

/// Right edge that keeps zero ghosts and the watched edge band outside the domain of
/// influence of data supported at j1 <= support_hi, for an explicit scheme run `steps` steps.
inline int explicit_right_extent(const MultistepScheme& scheme, int support_hi, long steps) {
  return support_hi + static_cast<int>(scheme.r1() * steps) + scheme.p1() + monitor_band(scheme);
}

/// Left edge, the mirror of explicit_right_extent, for the auxiliary band.
inline int explicit_left_extent(const MultistepScheme& scheme, int support_lo, long steps) {
  return std::min(1 - scheme.r1(),
                  support_lo - static_cast<int>(scheme.p1() * steps) - scheme.r1() - monitor_band(scheme));
}

namespace detail {

inline bool is_boundary_row(const ProblemSpec& spec, int j1) {
  return spec.kind != ProblemKind::cauchy_periodic && j1 <= 0;
}

/// Row values of the problem's left-hand sides for the s+2 levels in `w`.
/// `first_sigma`..`last_sigma` restricts which levels contribute.
inline GridFunction evaluate_rows(const ProblemSpec& spec, const StateWindow& w, int first_sigma,
                                  int last_sigma) {
  const auto& scheme = spec.scheme;
  auto out = GridFunction::zeros_like(w.level(0));
  const int s1 = scheme.s() + 1;
  for (int j1 = out.j_min(); j1 <= out.j_max(); ++j1) {
    const bool brow = is_boundary_row(spec, j1);
    for (int j2 = 0; j2 < out.n2(); ++j2) {
      double acc = 0.0;
      if (brow && spec.kind == ProblemKind::ibvp_halfline) {
        if (last_sigma == s1) acc += w.level(static_cast<std::size_t>(s1))(j1, j2);
        if (spec.bcs) {
          for (int sigma = first_sigma; sigma <= last_sigma; ++sigma) {
            const auto& lv = w.level(static_cast<std::size_t>(sigma));
            for (const auto& t : spec.bcs->taps(j1, sigma)) acc += t.weight * lv.value_or_zero(1 + t.l1, j2 + t.l2);
          }
        }
      } else {
        for (int sigma = first_sigma; sigma <= last_sigma; ++sigma) {
          const double weight = brow ? static_cast<double>(sigma) : 1.0;
          if (weight == 0.0) continue;
          const auto& lv = w.level(static_cast<std::size_t>(sigma));
          double q = 0.0;
          for (const auto& t : scheme.taps(sigma)) q += t.weight * lv.value_or_zero(j1 + t.l1, j2 + t.l2);
          acc += weight * q;
        }
      }
      out(j1, j2) = acc;
    }
  }
  return out;
}

/// Right-hand sides: dt * F at interior rows, g at boundary rows, at time level n.
inline GridFunction source_rows(const ProblemSpec& spec, long n) {
  auto out = spec.zero_level();
  for (int j1 = out.j_min(); j1 <= out.j_max(); ++j1) {
    const bool brow = is_boundary_row(spec, j1);
    const auto& src = brow ? spec.boundary : spec.interior;
    if (!src) continue;
    for (int j2 = 0; j2 < out.n2(); ++j2) out(j1, j2) = (brow ? 1.0 : spec.dt) * src(n, j1, j2);
  }
  return out;
}

}  // namespace detail

/// Solver for the newest level: A u^{n+s+1} = rhs, where A holds the sigma = s+1 blocks of all rows.
class StepOperator {
 public:
  enum class Method { automatic, explicit_update, sparse_lu, fourier };

  StepOperator(const ProblemSpec& spec, Method method = Method::automatic) : spec_(&spec) {
    if (method == Method::automatic) {
      method = explicit_ok() ? Method::explicit_update : Method::sparse_lu;
    }
    method_ = method;
    if (method_ == Method::explicit_update && !explicit_ok()) {
      throw InvalidArgument("step operator: scheme is not explicit");
    }
    if (method_ == Method::sparse_lu) factor();
    if (method_ == Method::fourier) prepare_fourier();
  }

  Method method() const { return method_; }

  GridFunction solve(const GridFunction& rhs) const {
    switch (method_) {
      case Method::explicit_update: return solve_explicit(rhs);
      case Method::sparse_lu: return solve_sparse(rhs);
      case Method::fourier: return solve_fourier(rhs);
      case Method::automatic: break;
    }
    throw Error("step operator: unresolved method");
  }

 private:
  bool explicit_ok() const { return spec_->scheme.is_explicit(); }

  GridFunction solve_explicit(const GridFunction& rhs) const {
    const int s1 = spec_->scheme.s() + 1;
    auto u = GridFunction::zeros_like(rhs);
    for (int j1 = u.j_min(); j1 <= u.j_max(); ++j1) {
      if (detail::is_boundary_row(*spec_, j1)) continue;
      for (int j2 = 0; j2 < u.n2(); ++j2) u(j1, j2) = rhs(j1, j2);
    }
    for (int j1 = u.j_min(); j1 <= std::min(0, u.j_max()); ++j1) {
      if (!detail::is_boundary_row(*spec_, j1)) continue;
      for (int j2 = 0; j2 < u.n2(); ++j2) {
        if (spec_->kind == ProblemKind::auxiliary) {
          u(j1, j2) = rhs(j1, j2) / static_cast<double>(s1);
        } else {
          double acc = rhs(j1, j2);
          if (spec_->bcs) {
            for (const auto& t : spec_->bcs->taps(j1, s1)) acc -= t.weight * u.value_or_zero(1 + t.l1, j2 + t.l2);
          }
          u(j1, j2) = acc;
        }
      }
    }
    return u;
  }

  std::size_t index(int j1, int j2) const {
    return static_cast<std::size_t>(j1 - spec_->j_min) * spec_->n2 + static_cast<std::size_t>(j2);
  }

  void factor() {
    const auto& scheme = spec_->scheme;
    const int s1 = scheme.s() + 1;
    const bool periodic = spec_->kind == ProblemKind::cauchy_periodic;
    const int n1 = spec_->j_max - spec_->j_min + 1;
    const auto n = static_cast<Eigen::Index>(n1) * spec_->n2;
    std::vector<Eigen::Triplet<double>> trip;
    auto add = [&](int row1, int row2, int col1, int col2, double v) {
      if (periodic) {
        col1 = spec_->j_min + GridFunction::wrap(col1 - spec_->j_min, n1);
      } else if (col1 < spec_->j_min || col1 > spec_->j_max) {
        return;  // zero ghost
      }
      col2 = GridFunction::wrap(col2, spec_->n2);
      trip.emplace_back(static_cast<int>(index(row1, row2)), static_cast<int>(index(col1, col2)), v);
    };
    for (int j1 = spec_->j_min; j1 <= spec_->j_max; ++j1) {
      const bool brow = detail::is_boundary_row(*spec_, j1);
      for (int j2 = 0; j2 < spec_->n2; ++j2) {
        if (brow && spec_->kind == ProblemKind::ibvp_halfline) {
          add(j1, j2, j1, j2, 1.0);
          if (spec_->bcs) {
            for (const auto& t : spec_->bcs->taps(j1, s1)) add(j1, j2, 1 + t.l1, j2 + t.l2, t.weight);
          }
        } else {
          const double w = brow ? static_cast<double>(s1) : 1.0;
          for (const auto& t : scheme.taps(s1)) add(j1, j2, j1 + t.l1, j2 + t.l2, w * t.weight);
        }
      }
    }
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();
    lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu_->analyzePattern(a);
    lu_->factorize(a);
    if (lu_->info() != Eigen::Success) {
      throw SingularOperatorError("step operator: factorization failed (" + lu_->lastErrorMessage() + ")");
    }
    // A factorization of a singular matrix can succeed with a zero pivot; check the log-determinant.
    if (!std::isfinite(lu_->logAbsDeterminant())) {
      throw SingularOperatorError("step operator: the sigma = s+1 block is singular");
    }
  }

  GridFunction solve_sparse(const GridFunction& rhs) const {
    Eigen::Map<const Eigen::VectorXd> b(rhs.values().data(), static_cast<Eigen::Index>(rhs.values().size()));
    const Eigen::VectorXd x = lu_->solve(b);
    if (lu_->info() != Eigen::Success) throw SingularOperatorError("step operator: solve failed");
    auto u = GridFunction::zeros_like(rhs);
    std::copy(x.data(), x.data() + x.size(), u.values().begin());
    return u;
  }

  void prepare_fourier() {
    if (spec_->kind != ProblemKind::cauchy_periodic) {
      throw InvalidArgument("step operator: the Fourier route needs a periodic box");
    }
    const int n1 = spec_->j_max - spec_->j_min + 1;
    fourier_ = std::make_shared<PeriodicFourier>(n1, spec_->n2);
    const int s1 = spec_->scheme.s() + 1;
    for (std::size_t k = 0; k < fourier_->size(); ++k) {
      const auto xi = fourier_->xi(k, spec_->scheme.d());
      const cplx q = dispersion_polynomial(spec_->scheme, {xi})[static_cast<std::size_t>(s1)];
      if (std::abs(q) < 1e-12) throw SingularOperatorError("step operator: Q_{s+1} symbol vanishes at a mode");
      inv_symbol_.push_back(1.0 / q);
    }
  }

  GridFunction solve_fourier(const GridFunction& rhs) const {
    auto hat = fourier_->forward(rhs);
    for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= inv_symbol_[k];
    return fourier_->inverse_real(hat, rhs);
  }

  const ProblemSpec* spec_;
  Method method_ = Method::automatic;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
  std::shared_ptr<PeriodicFourier> fourier_;
  std::vector<cplx> inv_symbol_;
};

/// Raw per-level sequences; gamma-weighted sums are formed on demand.
struct NormReport {
  double dt = 0.0;
  int s = 0;
  std::vector<double> norm2;      ///< |||u^n|||^2 on the solution cells
  std::vector<double> trace2;     ///< sum_{j1 = 1-r1}^{p1} ||u^n_{j1}||^2
  std::vector<double> forcing2;   ///< |||F^n|||^2 on interior cells (0 for n <= s)
  std::vector<double> boundary2;  ///< sum_{j1 in boundary rows} ||g^n_{j1}||^2 (0 for n <= s)
  double initial2 = 0.0;          ///< sum_sigma |||f^sigma|||^2
  long N = 0;                     ///< last computed level

  double weight(double gamma, long n) const { return std::exp(-2.0 * gamma * static_cast<double>(n) * dt); }

  /// sum_{n = s+1}^{N} dt e^{-2 gamma n dt} x_n
  double weighted_sum(const std::vector<double>& x, double gamma) const {
    std::vector<double> terms;
    for (long n = s + 1; n < static_cast<long>(x.size()); ++n) terms.push_back(dt * weight(gamma, n) * x[n]);
    return pairwise_sum(terms);
  }

  /// sup_n e^{-2 gamma n dt} |||u^n|||^2
  double weighted_sup(double gamma) const {
    double m = 0.0;
    for (std::size_t n = 0; n < norm2.size(); ++n) m = std::max(m, weight(gamma, static_cast<long>(n)) * norm2[n]);
    return m;
  }

  /// e^{-2 gamma N dt} times the last unweighted summand of x.
  double tail(const std::vector<double>& x, double gamma) const {
    return x.empty() ? 0.0 : weight(gamma, static_cast<long>(x.size()) - 1) * x.back();
  }
};

struct EnergyTrace {
  std::vector<long> n;
  std::vector<double> E0;
  std::vector<double> D0;
  std::vector<double> l2norm;
  int periodic_size = 0;  ///< size of the periodic box the energy was evaluated on
};

struct Trajectory {
  std::vector<long> n;
  std::vector<GridFunction> levels;
};

struct RunResult {
  NormReport norms;
  EnergyTrace energy;
  Trajectory trajectory;
  StateWindow final_window;
  bool unstable = false;
  long first_bad_level = -1;
  StepOperator::Method method = StepOperator::Method::automatic;
};

class Simulator {
 public:
  explicit Simulator(ProblemSpec spec, StepOperator::Method method = StepOperator::Method::automatic)
      : spec_(std::make_shared<ProblemSpec>(std::move(spec))) {
    spec_->validate();
    step_ = std::make_shared<StepOperator>(*spec_, method);
  }

  const ProblemSpec& spec() const { return *spec_; }
  StepOperator::Method method() const { return step_->method(); }

  StateWindow initial_window() const {
    if (!spec_->initial.empty()) return StateWindow(spec_->initial, 0);
    return StateWindow(std::vector<GridFunction>(static_cast<std::size_t>(spec_->scheme.s() + 1), spec_->zero_level()), 0);
  }

  /// Level n+s+1 from levels n..n+s.
  GridFunction advance(const StateWindow& w, long n) const {
    w.require_size(static_cast<std::size_t>(spec_->scheme.s() + 1), "advance");
    spec_->zero_level().require_same_layout(w.level(0));
    const int s1 = spec_->scheme.s() + 1;
    auto levels = w.levels();
    levels.push_back(spec_->zero_level());
    const StateWindow full(std::move(levels), n);
    auto rhs = detail::source_rows(*spec_, n + s1);
    rhs -= detail::evaluate_rows(*spec_, full, 0, s1 - 1);
    return step_->solve(rhs);
  }

  /// max over rows of |lhs - rhs| / scale for the s+2 levels n..n+s+1.
  double row_residual(const StateWindow& w, long n) const {
    w.require_size(static_cast<std::size_t>(spec_->scheme.s() + 2), "row_residual");
    const int s1 = spec_->scheme.s() + 1;
    const auto lhs = detail::evaluate_rows(*spec_, w, 0, s1);
    const auto rhs = detail::source_rows(*spec_, n + s1);
    double scale = rhs.max_abs();
    for (const auto& g : w.levels()) scale = std::max(scale, g.max_abs());
    return scale > 0.0 ? (lhs - rhs).max_abs() / scale : 0.0;
  }

  RunResult run() const {
    const auto& spec = *spec_;
    const int s = spec.scheme.s();
    const int r1 = spec.scheme.r1();
    const int p1 = spec.scheme.p1();
    RunResult res;
    res.method = step_->method();
    res.norms.dt = spec.dt;
    res.norms.s = s;

    StateWindow w = initial_window();
    std::unique_ptr<EnergyFunctional> energy;
    int embed_margin = p1 + r1;
    if (spec.energy_trace) {
      const auto g = spec.kind == ProblemKind::cauchy_periodic ? w.level(0)
                                                               : periodic_embedding(w.level(0), embed_margin);
      energy = std::make_unique<EnergyFunctional>(spec.scheme, g.n1(), g.n2(), g.dx());
      res.energy.periodic_size = g.n1();
    }

    double scale2 = 0.0;
    auto record_level = [&](long n, const GridFunction& g) {
      res.norms.norm2.push_back(g.norm2(spec.norm_lo(), g.j_max()));
      double tr = 0.0;
      if (spec.kind != ProblemKind::cauchy_periodic) {
        for (int j1 = 1 - r1; j1 <= p1; ++j1) tr += g.slice_norm2(j1);
      }
      res.norms.trace2.push_back(tr);
      double f2 = 0.0;
      double g2 = 0.0;
      if (n > s) {
        const auto src = detail::source_rows(spec, n);
        for (int j1 = src.j_min(); j1 <= src.j_max(); ++j1) {
          if (detail::is_boundary_row(spec, j1)) {
            g2 += src.slice_norm2(j1);
          } else {
            const double sl = src.slice_norm2(j1) * g.dx()[0];
            f2 += sl / (spec.dt * spec.dt);
          }
        }
      }
      res.norms.forcing2.push_back(f2);
      res.norms.boundary2.push_back(g2);
      res.norms.N = n;
      scale2 = std::max(scale2, g.norm2());
      if (spec.trajectory_stride > 0 && n % spec.trajectory_stride == 0) {
        res.trajectory.n.push_back(n);
        res.trajectory.levels.push_back(g);
      }
    };
    auto record_energy = [&](const StateWindow& win) {
      if (!energy) return;
      EnergyValue ev;
      if (spec.kind == ProblemKind::cauchy_periodic) {
        ev = energy->evaluate(win);
      } else {
        std::vector<GridFunction> emb;
        for (const auto& g : win.levels()) emb.push_back(periodic_embedding(g, embed_margin));
        ev = energy->evaluate(StateWindow(std::move(emb), win.base_index()));
      }
      res.energy.n.push_back(win.base_index());
      res.energy.E0.push_back(ev.E0);
      res.energy.D0.push_back(ev.D0);
      res.energy.l2norm.push_back(std::sqrt(win.level(0).norm2()));
    };

    for (int k = 0; k <= s; ++k) {
      res.norms.initial2 += w.level(static_cast<std::size_t>(k)).norm2(spec.norm_lo(), spec.j_max);
      record_level(k, w.level(static_cast<std::size_t>(k)));
    }
    record_energy(w);

    const int band = monitor_band(spec.scheme);
    for (long step = 0; step < spec.steps; ++step) {
      const long n_new = w.base_index() + s + 1;
      auto next = advance(w, w.base_index());
      const double m = next.max_abs();
      if (!std::isfinite(m) || m > spec.overflow_threshold) {
        res.unstable = true;
        res.first_bad_level = n_new;
        break;
      }
      record_level(n_new, next);
      if (spec.monitor_tail && spec.kind != ProblemKind::cauchy_periodic) {
        double tail2 = next.norm2(spec.j_max - band + 1, spec.j_max);
        if (spec.kind == ProblemKind::auxiliary) tail2 += next.norm2(spec.j_min, spec.j_min + band - 1);
        if (tail2 > 0.0 && std::sqrt(tail2) > spec.tail_tol * std::sqrt(scale2)) {
          throw TruncationError("run: solution reached the truncated edge at level " + std::to_string(n_new) +
                                " (enlarge the box)");
        }
      }
      w.shift_in(std::move(next));
      record_energy(w);
    }
    if (spec.trajectory_stride > 0 && (res.trajectory.n.empty() || res.trajectory.n.back() != res.norms.N) &&
        !res.unstable) {
      res.trajectory.n.push_back(res.norms.N);
      res.trajectory.levels.push_back(w.level(static_cast<std::size_t>(s)));
    }
    res.final_window = std::move(w);
    return res;
  }

 private:
  std::shared_ptr<ProblemSpec> spec_;
  std::shared_ptr<StepOperator> step_;
};

inline GridFunction advance(const ProblemSpec& spec, const StateWindow& w, long n) {
  return Simulator(spec).advance(w, n);
}

inline RunResult run(const ProblemSpec& spec) { return Simulator(spec).run(); }

/// Sentinel for undefined ratios.
inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

/// sup_n |||u^n|||^2 / sum_sigma |||f^sigma|||^2; NaN for zero initial data.
inline double semigroup_ratio(const NormReport& r) {
  if (!(r.initial2 > 0.0)) return kUndefined;
  return *std::max_element(r.norm2.begin(), r.norm2.end()) / r.initial2;
}

struct StrongStabilityTerms {
  double gamma = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = kUndefined;  ///< lhs / rhs
  double lhs_tail = 0.0;
  double rhs_tail = 0.0;
};

/// LHS / RHS of the strong stability estimate with all gamma weights:
///   LHS = gamma/(gamma dt + 1) sum dt e^{-2 gamma n dt} |||u^n|||^2 + sum dt e^{-2 gamma n dt} trace_n
///   RHS = (gamma dt + 1)/gamma sum dt e^{-2 gamma n dt} |||F^n|||^2 + sum dt e^{-2 gamma n dt} ||g^n||^2
inline StrongStabilityTerms strong_stability_residual(const NormReport& r, double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("strong stability: gamma must be positive");
  StrongStabilityTerms t;
  t.gamma = gamma;
  const double gd = gamma * r.dt + 1.0;
  t.lhs = gamma / gd * r.weighted_sum(r.norm2, gamma) + r.weighted_sum(r.trace2, gamma);
  t.rhs = gd / gamma * r.weighted_sum(r.forcing2, gamma) + r.weighted_sum(r.boundary2, gamma);
  t.lhs_tail = r.dt * (gamma / gd * r.tail(r.norm2, gamma) + r.tail(r.trace2, gamma));
  t.rhs_tail = r.dt * (gd / gamma * r.tail(r.forcing2, gamma) + r.tail(r.boundary2, gamma));
  if (t.rhs > 0.0) t.ratio = t.lhs / t.rhs;
  return t;
}

struct SuperpositionSpec {
  MultistepScheme scheme;
  std::optional<BoundaryStencilSet> bcs;
  double dt = 0.1;
  long steps = 0;
  int j_max = 0;   ///< right edge of every box
  int j_left = 0;  ///< left edge of the auxiliary box (<= 1 - r1)
  std::vector<GridFunction> initial;  ///< s+1 levels on [1 - r1, j_max]
  double tail_tol = 1e-8;
};

struct SuperpositionResult {
  double max_discrepancy = 0.0;  ///< max |u - (v + w)|
  double scale = 0.0;            ///< max |u|
  double relative = 0.0;
  long levels = 0;
};

/// u (half-line, F = 0, g = 0) against v + w, where v solves the auxiliary problem from the
/// zero-extended data and w the half-line problem with zero data and boundary source g~.
inline SuperpositionResult superposition_check(const SuperpositionSpec& sp) {
  const int s = sp.scheme.s();
  const int s1 = s + 1;
  const int r1 = sp.scheme.r1();

  ProblemSpec u_spec{sp.scheme, ProblemKind::ibvp_halfline, sp.bcs, 1 - r1, sp.j_max};
  u_spec.dt = sp.dt;
  u_spec.steps = sp.steps;
  u_spec.initial = sp.initial;
  u_spec.trajectory_stride = 1;
  u_spec.tail_tol = sp.tail_tol;
  const auto u = run(u_spec);

  ProblemSpec v_spec{sp.scheme, ProblemKind::auxiliary, std::nullopt, sp.j_left, sp.j_max};
  v_spec.dt = sp.dt;
  v_spec.steps = sp.steps;
  for (const auto& g : sp.initial) v_spec.initial.push_back(g.resized(sp.j_left, sp.j_max));
  v_spec.trajectory_stride = 1;
  v_spec.tail_tol = sp.tail_tol;
  const auto v = run(v_spec);

  // g~^{n+s+1}_{j1} = -(v^{n+s+1}_{j1} + sum_sigma B_{j1,sigma} v^{n+sigma}_1)
  const auto& vl = v.trajectory.levels;
  const auto bcs = sp.bcs;
  Source gtilde = [&vl, bcs, s1](long n, int j1, int j2) {
    double acc = vl.at(static_cast<std::size_t>(n))(j1, j2);
    if (bcs) {
      for (int sigma = 0; sigma <= s1; ++sigma) {
        const auto& lv = vl.at(static_cast<std::size_t>(n - s1 + sigma));
        for (const auto& t : bcs->taps(j1, sigma)) acc += t.weight * lv.value_or_zero(1 + t.l1, j2 + t.l2);
      }
    }
    return -acc;
  };
  ProblemSpec w_spec{sp.scheme, ProblemKind::ibvp_halfline, sp.bcs, 1 - r1, sp.j_max};
  w_spec.dt = sp.dt;
  w_spec.steps = sp.steps;
  w_spec.boundary = gtilde;
  w_spec.trajectory_stride = 1;
  w_spec.tail_tol = sp.tail_tol;
  const auto w = run(w_spec);

  SuperpositionResult res;
  const std::size_t n_levels = std::min({u.trajectory.levels.size(), v.trajectory.levels.size(),
                                         w.trajectory.levels.size()});
  res.levels = static_cast<long>(n_levels);
  for (std::size_t n = 0; n < n_levels; ++n) {
    const auto& un = u.trajectory.levels[n];
    const auto& vn = v.trajectory.levels[n];
    const auto& wn = w.trajectory.levels[n];
    for (int j1 = un.j_min(); j1 <= un.j_max(); ++j1) {
      for (int j2 = 0; j2 < un.n2(); ++j2) {
        res.max_discrepancy = std::max(res.max_discrepancy, std::abs(un(j1, j2) - (vn(j1, j2) + wn(j1, j2))));
        res.scale = std::max(res.scale, std::abs(un(j1, j2)));
      }
    }
  }
  res.relative = res.scale > 0.0 ? res.max_discrepancy / res.scale : 0.0;
  return res;
}

}  // namespace fdstab
