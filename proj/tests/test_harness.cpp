#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dpr/harness.hpp"
#include "dpr/rng.hpp"

using namespace dpr;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig solve_fixture(const fs::path& out) {
  ExperimentConfig config;
  config.kind = ExperimentKind::solve;
  config.dims = {4, {48, 192}};
  config.m = 80;
  config.solver.max_iters = 800;
  config.solver.grad_tol = 1e-5;
  config.solver.restarts = 2;
  config.seed = 2024;
  config.seed_set = true;
  config.out_dir = out.string();
  return config;
}

}  // namespace

TEST_CASE("seed splitting is deterministic and collision-free in practice") {
  CHECK(split_seed(1, 0) == split_seed(1, 0));
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) seen.insert(split_seed(42, i));
  CHECK(seen.size() == 10000);
  CHECK(split_seed(42, 0) != split_seed(43, 0));
}

TEST_CASE("config JSON round trip and validation") {
  ExperimentConfig config;
  config.kind = ExperimentKind::sweep;
  config.dims = {6, {300, 1200}};
  config.m_grid = {30, 60, 120};
  config.trials = 10;
  config.seed = 99;
  config.seed_set = true;
  config.solver.restarts = 5;
  config.solver.variant = SolverVariant::adaptive_moment;
  config.noise_level = 1e-3;

  ExperimentConfig back = config_from_json(config_to_json(config));
  CHECK(back.kind == config.kind);
  CHECK(back.dims.k == 6);
  CHECK(back.dims.layer_dims == std::vector<int>{300, 1200});
  CHECK(back.m_grid == config.m_grid);
  CHECK(back.seed == 99);
  CHECK(back.solver.restarts == 5);
  CHECK(back.solver.variant == SolverVariant::adaptive_moment);
  CHECK(back.noise_level == 1e-3);

  nlohmann::json no_seed = config_to_json(config);
  no_seed.erase("seed");
  CHECK_THROWS_AS(config_from_json(no_seed), ConfigError);
  nlohmann::json bad_kind = config_to_json(config);
  bad_kind["kind"] = "frobnicate";
  CHECK_THROWS_AS(config_from_json(bad_kind), ConfigError);
  CHECK_THROWS_AS(experiment_kind_from_string("nope"), ConfigError);
}

TEST_CASE("overrides take precedence") {
  ExperimentConfig config;
  config.seed = 1;
  config.out_dir = "a";
  config.workers = 1;
  ConfigOverrides overrides;
  overrides.seed = 7;
  overrides.out_dir = "b";
  overrides.workers = 3;
  apply_overrides(config, overrides);
  CHECK(config.seed == 7);
  CHECK(config.out_dir == "b");
  CHECK(config.workers == 3);
  CHECK(config.seed_set);
}

TEST_CASE("solve experiment writes artifacts and is byte-stable across reruns") {
  fs::path out = fresh_dir("dpr_harness_solve");
  ExperimentConfig config = solve_fixture(out);
  REQUIRE(run(config) == kExitOk);
  const std::string trace1 = slurp(out / "trace.csv");
  const std::string summary1 = slurp(out / "summary.json");

  // Same config, same outputs, byte for byte.
  REQUIRE(run(config) == kExitOk);
  CHECK(trace1 == slurp(out / "trace.csv"));
  CHECK(summary1 == slurp(out / "summary.json"));

  CHECK(trace1.rfind("# dpr ", 0) == 0);
  CHECK(trace1.find("t,f,grad_norm,negated,rel_latent_err") != std::string::npos);

  nlohmann::json summary = nlohmann::json::parse(summary1);
  CHECK(summary["rel_latent_err"].get<double>() < 1e-2);
  CHECK(summary["config"]["seed"] == 2024);
  CHECK(summary.contains("version"));
  fs::remove_all(out);
}

TEST_CASE("missing seed and absurd configs exit with the config code") {
  ExperimentConfig config = solve_fixture(fresh_dir("dpr_harness_badcfg"));
  config.seed_set = false;
  CHECK(run(config) == kExitConfig);

  config.seed_set = true;
  config.dims = {4, {2}};  // non-expansive
  CHECK(run(config) == kExitConfig);

  ExperimentConfig sweep;
  sweep.kind = ExperimentKind::sweep;
  sweep.seed_set = true;
  sweep.dims = {3, {16, 48}};
  sweep.m_grid = {};
  CHECK(run(sweep) == kExitConfig);
}

TEST_CASE("numeric blow-up exits with the numeric code") {
  fs::path out = fresh_dir("dpr_harness_nan");
  ExperimentConfig config = solve_fixture(out);
  config.noise_level = 1e200;  // drives f to infinity
  config.solver.max_iters = 50;
  CHECK(run(config) == kExitNumeric);
  fs::remove_all(out);
}

TEST_CASE("phase transition sweep: success rises from k to 20k measurements") {
  ExperimentConfig config;
  config.kind = ExperimentKind::sweep;
  config.dims = {3, {48, 192}};
  config.m_grid = {3, 60};
  config.trials = 8;
  config.workers = 2;
  config.seed = 512;
  config.seed_set = true;
  config.solver.max_iters = 800;
  config.solver.grad_tol = 1e-5;
  config.solver.restarts = 4;

  std::vector<SweepPoint> points = phase_transition_sweep(config);
  REQUIRE(points.size() == 2);
  CHECK(points[0].success_rate <= 0.25);  // m = k: hopeless
  CHECK(points[1].success_rate >= 0.75);  // m = 20k

  // Deterministic regardless of worker count.
  config.workers = 1;
  std::vector<SweepPoint> serial = phase_transition_sweep(config);
  CHECK(serial[0].success_rate == points[0].success_rate);
  CHECK(serial[1].mean_rel_err == points[1].mean_rel_err);

  // Degenerate single-trial run completes.
  config.trials = 1;
  config.m_grid = {60};
  std::vector<SweepPoint> single = phase_transition_sweep(config);
  CHECK(single.size() == 1);
  CHECK(single[0].trials == 1);
}

TEST_CASE("landscape experiment emits the documented grid columns") {
  fs::path out = fresh_dir("dpr_harness_landscape");
  ExperimentConfig config;
  config.kind = ExperimentKind::landscape;
  config.dims = {2, {16, 48}};
  config.m = 40;
  config.grid_resolution = 61;
  config.grid_range = 1.5;
  config.seed = 77;
  config.seed_set = true;
  config.out_dir = out.string();
  REQUIRE(run(config) == kExitOk);

  const std::string csv = slurp(out / "landscape.csv");
  CHECK(csv.find("x1,x2,F,f,h_norm,v_norm") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') > 3000);

  // Two-basin shape: the low-h cells form exactly two separated groups, one
  // around the minimizer and one around the negative multiple.
  std::istringstream lines(csv);
  std::string line;
  std::vector<std::array<double, 3>> low;  // x1, x2, h_norm
  double fmin = 1e300;
  std::array<double, 2> argmin{0, 0};
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
    double x1, x2, F, f, hn, vn;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &x1, &x2, &F, &f, &hn,
                        &vn) == 6);
    if (F < fmin) {
      fmin = F;
      argmin = {x1, x2};
    }
    if (4.0 * hn < 0.04) low.push_back({x1, x2, hn});
  }
  REQUIRE(low.size() >= 2);
  // Single-link clustering at a bit over the grid diagonal.
  std::vector<int> label(low.size(), -1);
  int clusters = 0;
  for (std::size_t i = 0; i < low.size(); ++i) {
    if (label[i] >= 0) continue;
    label[i] = clusters;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t j = stack.back();
      stack.pop_back();
      for (std::size_t l = 0; l < low.size(); ++l) {
        if (label[l] >= 0) continue;
        const double dist = std::hypot(low[j][0] - low[l][0], low[j][1] - low[l][1]);
        if (dist < 0.12) {
          label[l] = clusters;
          stack.push_back(l);
        }
      }
    }
    ++clusters;
  }
  CHECK(clusters == 2);
  // The global minimum of F sits in one of them, at roughly unit radius.
  CHECK(std::hypot(argmin[0], argmin[1]) == doctest::Approx(1.0).epsilon(0.15));
  fs::remove_all(out);

  config.dims = {3, {16, 48}};
  CHECK(run(config) == kExitConfig);  // scans require k = 2
}

TEST_CASE("verify, tessellate, and compare experiments write their reports") {
  fs::path out = fresh_dir("dpr_harness_misc");

  ExperimentConfig wdc;
  wdc.kind = ExperimentKind::verify_wdc;
  wdc.dims.k = 3;
  wdc.width_grid = {64, 256};
  wdc.num_pairs = 30;
  wdc.seed = 5;
  wdc.seed_set = true;
  wdc.out_dir = out.string();
  REQUIRE(run(wdc) == kExitOk);
  CHECK(slurp(out / "wdc_quantiles.csv").find("op,width,stat,value") != std::string::npos);
  nlohmann::json report = nlohmann::json::parse(slurp(out / "wdc_report.json"));
  CHECK(report["reports"].size() == 2);

  ExperimentConfig rrcp;
  rrcp.kind = ExperimentKind::verify_rrcp;
  rrcp.dims = {3, {16, 48}};
  rrcp.m = 64;
  rrcp.num_tuples = 12;
  rrcp.num_pairs = 12;
  rrcp.seed = 6;
  rrcp.seed_set = true;
  rrcp.out_dir = out.string();
  REQUIRE(run(rrcp) == kExitOk);
  CHECK(slurp(out / "rrcp_quantiles.csv").find("op,m,stat,value") != std::string::npos);

  ExperimentConfig tess;
  tess.kind = ExperimentKind::tessellate;
  tess.ell = 2;
  tess.m_grid = {4, 7};
  tess.seed = 8;
  tess.seed_set = true;
  tess.out_dir = out.string();
  REQUIRE(run(tess) == kExitOk);
  const std::string tcsv = slurp(out / "tessellation.csv");
  CHECK(tcsv.find("m,ell,count,exact,sphere_covering,bound_10m2k") != std::string::npos);
  CHECK(tcsv.find("4,2,8,1,8,") != std::string::npos);

  ExperimentConfig cmp;
  cmp.kind = ExperimentKind::compare;
  cmp.dims = {2, {8, 24}};
  cmp.m_grid = {0, 50};
  cmp.trials = 2;
  cmp.solver.max_iters = 200;
  cmp.solver.restarts = 1;
  cmp.seed = 9;
  cmp.seed_set = true;
  cmp.out_dir = out.string();
  REQUIRE(run(cmp) == kExitOk);
  CHECK(slurp(out / "compare.csv").find("m,algo,mean_err,success_rate,trials") !=
        std::string::npos);

  fs::remove_all(out);
}
