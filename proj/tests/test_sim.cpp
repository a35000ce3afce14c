#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace fdstab;
using oracle::cplx;
using oracle::pi;

namespace {

std::vector<GridFunction> random_levels(const ProblemSpec& p, std::uint64_t seed, int lo, int hi) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<GridFunction> out;
  for (int k = 0; k <= p.scheme.s(); ++k) {
    auto z = p.zero_level();
    for (int j = std::max(lo, z.j_min()); j <= std::min(hi, z.j_max()); ++j) {
      for (int j2 = 0; j2 < z.n2(); ++j2) z(j, j2) = g(rng);
    }
    out.push_back(std::move(z));
  }
  return out;
}

ProblemSpec periodic_spec(const MultistepScheme& s, int n, long steps, double dt = 0.01) {
  ProblemSpec p{s, ProblemKind::cauchy_periodic, std::nullopt, 0, n - 1};
  p.dt = dt;
  p.steps = steps;
  return p;
}

ProblemSpec halfline_spec(const MultistepScheme& s, int j_max, long steps, double dt = 0.01) {
  ProblemSpec p{s, ProblemKind::ibvp_halfline, std::nullopt, 1 - s.r1(), j_max};
  p.dt = dt;
  p.steps = steps;
  return p;
}

double rel_diff(const GridFunction& a, const GridFunction& b) {
  return support::max_abs_diff(a, b) / std::max(a.max_abs(), 1e-300);
}

}  // namespace

TEST(Step, LeapfrogDirichletMatchesHandStencil) {
  const double la = -0.8;
  const auto s = leapfrog1d(-1.0, 0.8);
  auto p = halfline_spec(s, 20, 1);
  p.initial = random_levels(p, 5, 1, 20);
  const auto next = advance(p, StateWindow(p.initial), 0);
  const auto& u0 = p.initial[0];
  const auto& u1 = p.initial[1];
  EXPECT_EQ(next(0), 0.0);
  for (int j = 1; j <= 20; ++j) {
    const double up = j + 1 <= 20 ? u1(j + 1) : 0.0;
    const double expect = u0(j) - la * (up - u1(j - 1));
    EXPECT_NEAR(next(j), expect, 1e-14) << j;
  }
}

TEST(Step, ZeroDataGivesZeroLevel) {
  for (const auto& s : {leapfrog1d(-1.0, 0.8), bdf2_1d(-1.0, 0.5)}) {
    auto p = halfline_spec(s, 30, 1);
    Simulator sim(p);
    const auto next = sim.advance(sim.initial_window(), 0);
    EXPECT_EQ(next.max_abs(), 0.0) << s.name();
  }
}

TEST(Step, ImplicitFourierMatchesLu) {
  const auto s = bdf2_1d(-1.0, 0.5);
  auto p = periodic_spec(s, 48, 1);
  p.initial = random_levels(p, 7, 0, 47);
  const Simulator fft(p, StepOperator::Method::fourier);
  const Simulator lu(p, StepOperator::Method::sparse_lu);
  const auto a = fft.advance(fft.initial_window(), 0);
  const auto b = lu.advance(lu.initial_window(), 0);
  EXPECT_LE(rel_diff(a, b), 1e-11);
}

TEST(Step, RowResidualsSmall) {
  const auto s = bdf2_1d(-1.0, 0.5);
  auto p = halfline_spec(s, 60, 1);
  p.initial = random_levels(p, 8, 1, 40);
  p.interior = [](long n, int j, int) { return std::sin(0.1 * j + static_cast<double>(n)); };
  p.boundary = [](long n, int, int) { return 0.3 * static_cast<double>(n); };
  const Simulator sim(p);
  auto levels = p.initial;
  levels.push_back(sim.advance(StateWindow(p.initial), 0));
  EXPECT_LE(sim.row_residual(StateWindow(levels), 0), 1e-10);
  EXPECT_NEAR(levels.back()(0), 0.6, 1e-12);
}

TEST(Run, CauchyLeapfrogEnergyConstant) {
  const auto s = leapfrog1d(-1.0, 0.8);
  auto p = periodic_spec(s, 64, 400);
  p.initial = random_levels(p, 9, 0, 63);
  p.energy_trace = true;
  const auto r = run(p);
  ASSERT_EQ(r.energy.E0.size(), 401u);
  const double e0 = r.energy.E0.front();
  for (double e : r.energy.E0) EXPECT_NEAR(e, e0, 1e-12 * e0);
  std::vector<double> v0(p.initial[0].values().begin(), p.initial[0].values().end());
  std::vector<double> v1(p.initial[1].values().begin(), p.initial[1].values().end());
  EXPECT_NEAR(e0, oracle::leapfrog_energy(-0.8, v0, v1, p.dx()[0]), 1e-12 * e0);
}

TEST(Run, AuxiliaryEnergyNonincreasing) {
  const auto r = auxiliary_run(leapfrog1d(-1.0, 0.8), 40, 200, true);
  EXPECT_LE(r.max_increase, 1e-12);
  EXPECT_LT(r.E0_last, r.E0_first);
  EXPECT_GT(r.periodic_size, 0);
}

TEST(Run, UnstableGrowthMatchesRootModulus) {
  const double la = 1.1;
  const auto s = leapfrog1d(1.0, la);
  // On 8 points only xi = pi/2, 3pi/2 are unstable, with equal root moduli.
  auto p = periodic_spec(s, 8, 200, 0.01);
  p.initial = random_levels(p, 10, 0, 7);
  const auto r = run(p);
  ASSERT_FALSE(r.unstable);
  double rho = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double xi = 2.0 * pi * k / 8;
    const auto [x, y] = oracle::quadratic_roots(1.0, cplx{0.0, 2.0 * la * std::sin(xi)}, -1.0);
    rho = std::max({rho, std::abs(x), std::abs(y)});
  }
  const auto& n2 = r.norms.norm2;
  const double observed = std::pow(n2.back() / n2[n2.size() - 41], 1.0 / 80.0);
  EXPECT_NEAR(observed, rho, 1e-6 * rho);
  EXPECT_NEAR(rho, 1.1 + std::sqrt(0.21), 1e-12);
}

TEST(Run, OverflowFlagged) {
  auto p = periodic_spec(leapfrog1d(1.0, 1.5), 32, 5000);
  p.initial = random_levels(p, 10, 0, 31);
  const auto r = run(p);
  EXPECT_TRUE(r.unstable);
  EXPECT_GT(r.first_bad_level, 1);
}

TEST(Run, DeterministicAndLinear) {
  const auto s = bdf2_1d(-1.0, 0.5);
  auto p = halfline_spec(s, 200, 40);
  p.trajectory_stride = 10;
  auto pa = p;
  auto pb = p;
  pa.initial = random_levels(p, 1, 1, 60);
  pb.initial = random_levels(p, 2, 1, 60);
  auto pc = p;
  for (std::size_t k = 0; k < pa.initial.size(); ++k) pc.initial.push_back(pa.initial[k] + 2.0 * pb.initial[k]);
  const auto ra = run(pa);
  const auto ra2 = run(pa);
  const auto rb = run(pb);
  const auto rc = run(pc);
  ASSERT_EQ(ra.trajectory.levels.size(), ra2.trajectory.levels.size());
  for (std::size_t i = 0; i < ra.trajectory.levels.size(); ++i) {
    EXPECT_EQ(support::max_abs_diff(ra.trajectory.levels[i], ra2.trajectory.levels[i]), 0.0);
    const auto combo = ra.trajectory.levels[i] + 2.0 * rb.trajectory.levels[i];
    EXPECT_LE(rel_diff(combo, rc.trajectory.levels[i]), 1e-12);
  }
  EXPECT_EQ(ra.norms.norm2, ra2.norms.norm2);
}

TEST(Run, HalflineAgreesWithCauchyAwayFromBoundary) {
  const auto s = leapfrog1d(-1.0, 0.8);
  const long steps = 15;
  auto h = halfline_spec(s, 120, steps);
  h.initial = random_levels(h, 3, 30, 60);
  auto c = periodic_spec(s, 300, steps);
  c.j_min = -100;
  c.j_max = 199;
  for (const auto& g : h.initial) {
    auto z = c.zero_level();
    for (int j = g.j_min(); j <= g.j_max(); ++j) z(j) = g(j);
    c.initial.push_back(std::move(z));
  }
  const auto rh = run(h);
  const auto rc = run(c);
  const auto& uh = rh.final_window.level(1);
  const auto& uc = rc.final_window.level(1);
  double worst = 0.0;
  for (int j = uh.j_min(); j <= uh.j_max(); ++j) worst = std::max(worst, std::abs(uh(j) - uc(j)));
  EXPECT_LE(worst, 1e-13 * uc.max_abs());
}

TEST(Run, TruncationDetected) {
  const auto s = leapfrog1d(-1.0, 0.8);
  auto p = halfline_spec(s, 30, 50);
  p.initial = random_levels(p, 4, 1, 30);
  EXPECT_THROW(run(p), TruncationError);
}

TEST(Run, TrajectoryStrideAndFinalLevel) {
  auto p = periodic_spec(leapfrog1d(-1.0, 0.8), 32, 23);
  p.initial = random_levels(p, 4, 0, 31);
  p.trajectory_stride = 10;
  const auto r = run(p);
  EXPECT_EQ(r.norms.N, 24);
  ASSERT_FALSE(r.trajectory.n.empty());
  EXPECT_EQ(r.trajectory.n.back(), 24);
  EXPECT_EQ(support::max_abs_diff(r.trajectory.levels.back(), r.final_window.level(1)), 0.0);
}

TEST(ProblemSpecTest, ValidationErrors) {
  const auto s = leapfrog1d(-1.0, 0.8);
  auto p = halfline_spec(s, 20, 1);
  auto bad = p;
  bad.dt = 1.5;
  EXPECT_THROW(Simulator{bad}, InvalidArgument);
  bad = p;
  bad.j_min = 3;
  EXPECT_THROW(Simulator{bad}, InvalidArgument);
  bad = p;
  bad.n2 = 2;
  EXPECT_THROW(Simulator{bad}, InvalidArgument);
  bad = p;
  bad.initial = {p.zero_level()};
  EXPECT_THROW(Simulator{bad}, InvalidArgument);
  bad = p;
  bad.steps = -1;
  EXPECT_THROW(Simulator{bad}, InvalidArgument);
  bad = periodic_spec(s, 20, 1);
  bad.bcs = BoundaryStencilSet::dirichlet(s);
  EXPECT_THROW(Simulator{bad}, InvalidArgument);
  bad = p;
  bad.kind = ProblemKind::auxiliary;
  bad.j_min = 1;
  EXPECT_THROW(Simulator{bad}, InvalidArgument);
}

TEST(StepOperatorTest, SingularTopBlock) {
  // (S - S^-1)/2 u^{n+1} = u^n annihilates constants on a periodic box.
  const std::vector<StencilEntry> e{{{1}, 1, 0.5}, {{-1}, 1, -0.5}, {{0}, 0, -1.0}};
  const MultistepScheme s(0, {1}, {1}, {0.5}, e, "singular");
  const auto p = periodic_spec(s, 16, 1);
  EXPECT_THROW(Simulator(p, StepOperator::Method::sparse_lu), SingularOperatorError);
  EXPECT_THROW(Simulator(p, StepOperator::Method::fourier), SingularOperatorError);
}

TEST(Norms, SemigroupUndefinedForZeroData) {
  auto p = halfline_spec(leapfrog1d(-1.0, 0.8), 20, 3);
  const auto r = run(p);
  EXPECT_TRUE(std::isnan(semigroup_ratio(r.norms)));
}

TEST(Norms, SemigroupRatioUnderRefinement) {
  const auto s = leapfrog1d(-1.0, 0.5);
  const auto a = reflection_run(s, 100, 1.0);
  const auto b = reflection_run(s, 200, 1.0);
  EXPECT_NEAR(a.semigroup, b.semigroup, 0.05 * a.semigroup);
  EXPECT_LE(a.semigroup, 1.05);
}

TEST(StrongStability, RejectsNonpositiveGamma) {
  NormReport r;
  EXPECT_THROW(strong_stability_residual(r, 0.0), InvalidArgument);
  EXPECT_THROW(strong_stability_residual(r, -1.0), InvalidArgument);
}

TEST(StrongStability, ZeroOverZeroIsUndefined) {
  auto p = halfline_spec(leapfrog1d(-1.0, 0.8), 20, 5);
  const auto t = strong_stability_residual(run(p).norms, 1.0);
  EXPECT_TRUE(std::isnan(t.ratio));
  EXPECT_EQ(t.lhs, 0.0);
}

TEST(StrongStability, MatchesDirectSums) {
  const auto s = bdf2_1d(-1.0, 0.5);
  auto p = halfline_spec(s, 200, 60, 0.02);
  p.boundary = [](long n, int, int) { return n == 2 ? 1.0 : 0.0; };
  p.interior = [](long n, int j, int) { return j < 10 ? 0.1 * std::cos(0.3 * n) : 0.0; };
  const auto r = run(p);
  for (double gamma : {0.5, 1.0, 2.0}) {
    const auto t = strong_stability_residual(r.norms, gamma);
    double lhs = 0.0;
    double rhs = 0.0;
    const double gd = gamma * p.dt + 1.0;
    for (long n = s.s() + 1; n <= r.norms.N; ++n) {
      const double w = p.dt * std::exp(-2.0 * gamma * n * p.dt);
      lhs += w * (gamma / gd * r.norms.norm2[n] + r.norms.trace2[n]);
      rhs += w * (gd / gamma * r.norms.forcing2[n] + r.norms.boundary2[n]);
    }
    EXPECT_NEAR(t.lhs, lhs, 1e-12 * lhs);
    EXPECT_NEAR(t.rhs, rhs, 1e-12 * rhs);
    EXPECT_NEAR(t.ratio, lhs / rhs, 1e-12 * lhs / rhs);
  }
  // A pure boundary impulse is weighted by e^{-2 gamma n dt}; doubling gamma scales its
  // contribution by exactly that factor.
  auto q = halfline_spec(s, 200, 60, 0.02);
  q.boundary = [](long n, int, int) { return n == 2 ? 1.0 : 0.0; };
  const auto rq = run(q);
  const auto t1 = strong_stability_residual(rq.norms, 1.0);
  const auto t2 = strong_stability_residual(rq.norms, 2.0);
  EXPECT_NEAR(t2.rhs / t1.rhs, std::exp(-2.0 * 2 * q.dt), 1e-12);
  EXPECT_LT(t2.lhs, t1.lhs);
}

TEST(Superposition, ZeroDataIsExact) {
  const auto s = leapfrog1d(-1.0, 0.8);
  SuperpositionSpec sp{s, BoundaryStencilSet::dirichlet(s), 0.01, 20, 60, -30};
  for (int k = 0; k < 2; ++k) sp.initial.push_back(GridFunction(0, 60, 1, {0.01 / 0.8}));
  const auto r = superposition_check(sp);
  EXPECT_EQ(r.max_discrepancy, 0.0);
}

TEST(Superposition, ExplicitAndImplicit) {
  const auto lf = detail::superposition_run(leapfrog1d(-1.0, 0.8), 50, 150);
  EXPECT_LE(lf.relative, 1e-10);
  EXPECT_GT(lf.levels, 100);
  const auto bd = detail::superposition_run(bdf2_1d(-1.0, 0.8), 50, 150);
  EXPECT_LE(bd.relative, 1e-9);
}

TEST(Extents, ExplicitBoxes) {
  const auto s = leapfrog1d(-1.0, 0.8);
  EXPECT_EQ(monitor_band(s), 6);
  EXPECT_EQ(explicit_right_extent(s, 10, 5), 10 + 5 + 1 + 6);
  EXPECT_EQ(explicit_left_extent(s, 1, 5), 1 - 5 - 1 - 6);
  EXPECT_EQ(explicit_left_extent(s, 1, 0), -6);
}
