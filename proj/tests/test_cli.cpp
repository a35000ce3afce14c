#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support.hpp"

using namespace fdstab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  auto p = fs::temp_directory_path() / "fdstab_tests" / (std::string(info->test_suite_name()) + "." + info->name()) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

Trajectory ramp_trajectory(long N, int n2) {
  Trajectory t;
  std::vector<double> dx{0.1};
  if (n2 > 1) dx.push_back(0.1);
  for (long n = 0; n <= N; ++n) {
    GridFunction g(-2, 5, n2, dx);
    g.fill([n](int j1, int j2) { return 0.1 * n + j1 + std::sqrt(2.0) * j2 + 1.0 / 3.0; });
    t.n.push_back(n);
    t.levels.push_back(std::move(g));
  }
  return t;
}

}  // namespace

TEST(Registry, DefaultsMatchGoldenTable) {
  const auto golden = json::parse(std::ifstream(fs::path(FDSTAB_GOLDEN_DIR) / "registry_coefficients.json"));
  const auto reg = build_registry();
  ASSERT_EQ(reg.names().size(), golden.size());
  for (const auto& [name, entry] : golden.items()) {
    ASSERT_TRUE(reg.contains(name)) << name;
    const auto s = reg.make(name);
    EXPECT_EQ(json(reg.entry(name).defaults), entry.at("params")) << name;
    oracle::Table want;
    for (const auto& c : entry.at("coefficients")) want[{c[0].get<int>(), c[1].get<int>(), c[2].get<int>()}] = c[3].get<double>();
    auto got = support::to_table(s);
    std::erase_if(got, [](const auto& kv) { return kv.second == 0.0; });
    ASSERT_EQ(got.size(), want.size()) << name;
    for (const auto& [k, v] : want) {
      ASSERT_TRUE(got.count(k)) << name;
      EXPECT_NEAR(got.at(k), v, 1e-15) << name;
    }
  }
}

TEST(Registry, ParseOverrides) {
  const auto reg = build_registry();
  const auto s = reg.parse("leapfrog1d:a=2,lambda=0.25");
  EXPECT_EQ(s.lambda()[0], 0.25);
  const auto t = support::to_table(s);
  EXPECT_DOUBLE_EQ(t.at({1, 0, 1}), 0.5);
  EXPECT_DOUBLE_EQ(t.at({-1, 0, 1}), -0.5);
}

TEST(Registry, ParseErrors) {
  const auto reg = build_registry();
  EXPECT_THROW(reg.parse("nosuch"), InvalidArgument);
  EXPECT_THROW(reg.parse("leapfrog1d:b=1"), InvalidArgument);
  EXPECT_THROW(reg.parse("leapfrog1d:a=x"), InvalidArgument);
  EXPECT_THROW(reg.parse("leapfrog1d:a=1q"), InvalidArgument);
  EXPECT_THROW(reg.parse("leapfrog1d:a"), InvalidArgument);
}

TEST(PlotData, FramesAtStride) {
  const auto dir = scratch("frames");
  const auto paths = emit_plotdata(ramp_trajectory(100, 1), 25, dir, "experiment=x, seed=1");
  ASSERT_EQ(paths.size(), 4u);
  EXPECT_EQ(paths.front().filename(), "frame_00000025.csv");
  EXPECT_EQ(paths.back().filename(), "frame_00000100.csv");
  const auto idx = lines(dir / "frames.index");
  ASSERT_EQ(idx.size(), 4u);
  EXPECT_EQ(idx[1], "50,frame_00000050.csv");
  const auto l = lines(paths.front());
  EXPECT_EQ(l[0], "# experiment=x, seed=1");
  EXPECT_EQ(l[1], "n,j1,value");
  EXPECT_EQ(l.size(), 2u + 8u);
}

TEST(PlotData, StrideBeyondRunWritesFinalFrame) {
  const auto dir = scratch("frames");
  const auto paths = emit_plotdata(ramp_trajectory(30, 1), 500, dir);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0].filename(), "frame_00000030.csv");
}

TEST(PlotData, TwoDimensionalRoundTrip) {
  const auto dir = scratch("frames");
  const auto traj = ramp_trajectory(4, 3);
  const auto paths = emit_plotdata(traj, 2, dir);
  ASSERT_EQ(paths.size(), 2u);
  const auto l = lines(paths[1]);
  EXPECT_EQ(l[0], "n,j1,j2,value");
  const auto& g = traj.levels[4];
  std::size_t rows = 0;
  for (std::size_t i = 1; i < l.size(); ++i) {
    long n = 0;
    int j1 = 0;
    int j2 = 0;
    char c = 0;
    double v = 0.0;
    std::istringstream in(l[i]);
    in >> n >> c >> j1 >> c >> j2 >> c >> v;
    EXPECT_EQ(n, 4);
    EXPECT_EQ(v, g(j1, j2));
    ++rows;
  }
  EXPECT_EQ(rows, static_cast<std::size_t>(g.n1() * g.n2()));
}

TEST(PlotData, BadArguments) {
  EXPECT_THROW(emit_plotdata(ramp_trajectory(3, 1), 0, scratch("x")), InvalidArgument);
  EXPECT_THROW(emit_plotdata(Trajectory{}, 1, scratch("x")), InvalidArgument);
}

TEST(Experiments, ExitCodes) {
  ExperimentConfig cfg;
  cfg.experiment = "cauchy-energy";
  cfg.steps = 100;
  EXPECT_EQ(run_experiment(cfg).exit_code, 0);
  cfg.scheme = "leapfrog1d:lambda=1.1";
  const auto bad = run_experiment(cfg);
  EXPECT_EQ(bad.exit_code, 2);
  EXPECT_FALSE(bad.summary.at("pass").get<bool>());
  cfg.scheme = "nosuch";
  const auto err = run_experiment(cfg);
  EXPECT_EQ(err.exit_code, 1);
  EXPECT_TRUE(err.summary.contains("error"));
  cfg = {};
  cfg.experiment = "no-such-experiment";
  EXPECT_EQ(run_experiment(cfg).exit_code, 1);
}

TEST(Experiments, VonNeumannScanSeparatesThreshold) {
  ExperimentConfig cfg;
  cfg.experiment = "von-neumann-scan";
  cfg.scheme = "leapfrog1d";
  cfg.grid = 64;
  const auto o = run_experiment(cfg);
  EXPECT_EQ(o.exit_code, 0);
  EXPECT_TRUE(o.summary["scan"][0]["report"]["pass"].get<bool>());
  EXPECT_FALSE(o.summary["scan"][1]["report"]["pass"].get<bool>());
}

TEST(Experiments, RerunsAreByteIdentical) {
  ExperimentConfig cfg;
  cfg.experiment = "cauchy-energy";
  cfg.steps = 50;
  cfg.seed = 99;
  cfg.out_dir = scratch("a").string();
  ASSERT_EQ(run_experiment(cfg).exit_code, 0);
  const auto first = slurp(fs::path(cfg.out_dir) / "energy.csv");
  cfg.out_dir = scratch("b").string();
  ASSERT_EQ(run_experiment(cfg).exit_code, 0);
  EXPECT_EQ(slurp(fs::path(cfg.out_dir) / "energy.csv"), first);
  EXPECT_EQ(first.substr(0, first.find('\n')), "# experiment=cauchy-energy, seed=99");
  const auto summary = json::parse(slurp(fs::path(cfg.out_dir) / "summary.json"));
  EXPECT_EQ(summary.at("seed").get<std::uint64_t>(), 99u);

  cfg.seed = 100;
  cfg.out_dir = scratch("c").string();
  ASSERT_EQ(run_experiment(cfg).exit_code, 0);
  EXPECT_NE(slurp(fs::path(cfg.out_dir) / "energy.csv"), first);
}

TEST(Experiments, StrongStabilityCsv) {
  ExperimentConfig cfg;
  cfg.experiment = "strong-stability";
  cfg.grid = 40;
  cfg.steps = 100;
  cfg.gammas = {20.0, 40.0};
  cfg.out_dir = scratch("ss").string();
  const auto o = run_experiment(cfg);
  EXPECT_EQ(o.exit_code, 0);
  const auto l = lines(fs::path(cfg.out_dir) / "strong_stability.csv");
  ASSERT_EQ(l.size(), 4u);
  EXPECT_EQ(l[1], "gamma,gamma_dt,lhs,rhs,ratio,lhs_tail,rhs_tail");
}

TEST(Config, ParsesAllFields) {
  const json j{{"experiment", "strong-stability"}, {"scheme", "bdf2_1d:a=-1"}, {"grid", 40}, {"steps", 10},
               {"gammas", {0.5, 1.5}}, {"out", "o"}, {"seed", 3}, {"stride", 4}};
  const auto c = config_from_json(j);
  EXPECT_EQ(c.experiment, "strong-stability");
  EXPECT_EQ(c.scheme, "bdf2_1d:a=-1");
  EXPECT_EQ(c.grid, 40);
  EXPECT_EQ(c.steps, 10);
  EXPECT_EQ(c.gammas, (std::vector<double>{0.5, 1.5}));
  EXPECT_EQ(c.out_dir, "o");
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.stride, 4);
}

TEST(Config, RejectsUnknownAndMistyped) {
  EXPECT_THROW(config_from_json({{"experiment", "x"}, {"gird", 3}}), InvalidArgument);
  EXPECT_THROW(config_from_json({{"experiment", "x"}, {"grid", "many"}}), InvalidArgument);
  EXPECT_THROW(config_from_json({{"grid", 3}}), InvalidArgument);
}

TEST(Config, InlineSchemeAndRelativePath) {
  const auto s = leapfrog1d(-1.0, 0.6);
  const auto c = config_from_json({{"experiment", "cauchy-energy"}, {"scheme", scheme_to_json(s)}});
  ASSERT_TRUE(c.scheme_def.has_value());
  EXPECT_EQ(c.scheme_def->scheme.lambda()[0], 0.6);

  const auto file = load_config_file(fs::path(FDSTAB_DATA_DIR) / "configs" / "reflection.json");
  EXPECT_EQ(file.experiment, "dirichlet-reflection");
  EXPECT_EQ(file.seed, 7u);
  EXPECT_TRUE(fs::exists(file.scheme)) << file.scheme;
  const auto sf = config_scheme(file, "unused");
  EXPECT_EQ(sf.scheme.name(), "leapfrog1d");
  EXPECT_EQ(sf.scheme.lambda()[0], 0.8);
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config_file("/nonexistent/cfg.json"), Error);
}
