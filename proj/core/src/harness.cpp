#include "dpr/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "dpr/rng.hpp"

#ifndef DPR_VERSION_STRING
#define DPR_VERSION_STRING "0.0.0+unknown"
#endif

namespace dpr {

namespace fs = std::filesystem;

namespace {

struct FiniteGuard {
  bool ok = true;
  double check(double v) {
    if (!std::isfinite(v)) ok = false;
    return v;
  }
};

std::string artifact_header(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "# dpr " << version_string() << " config=" << config_to_json(config).dump() << "\n";
  return out.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

Eigen::VectorXd sample_unit_latent(int k, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return random_unit_vector(k, rng);
}

ProblemInstance instance_from_config(const ExperimentConfig& config, std::uint64_t seed,
                                     int m_override = 0) {
  const int m = m_override > 0 ? m_override : config.m;
  if (!config.dims.valid()) throw ConfigError("invalid network dims");
  if (m < 1) throw ConfigError("m must be positive");
  GeneratorNet net = sample_gaussian_net(config.dims, split_seed(seed, 100));
  Eigen::VectorXd x_star = sample_unit_latent(config.dims.k, split_seed(seed, 101));
  MeasurementEnsemble ens = sample_measurements(m, net.output_dim(), split_seed(seed, 102));
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(m);
  if (config.noise_level > 0.0) {
    Rng rng = make_rng(split_seed(seed, 103));
    Eigen::VectorXd dir = random_unit_vector(m, rng);
    const double scale =
        config.noise_level * std::exp2(-0.5 * config.dims.depth()) * x_star.norm();
    eta = scale * dir;
  }
  return make_instance(std::move(net), std::move(ens), std::move(x_star), eta);
}

int run_solve(const ExperimentConfig& config) {
  ProblemInstance inst = instance_from_config(config, config.seed);
  SolverConfig solver = config.solver;
  solver.seed = split_seed(config.seed, 104);
  IterateTrace trace = solver.restarts > 1 ? run_restarts(inst, solver)
                                           : solve(inst, solver, [&] {
                                               Rng rng = make_rng(split_seed(solver.seed, 0));
                                               return gaussian_vector(inst.latent_dim(), 1.0,
                                                                      rng);
                                             }());
  const double rel_err = relative_latent_error(trace.final_x, inst.x_star);
  const double recon = reconstruction_error(inst.net, trace.final_x,
                                            forward(inst.net, inst.x_star));
  FiniteGuard guard;
  guard.check(rel_err);
  guard.check(trace.final_f);

  const fs::path out_dir(config.out_dir);
  write_text_file(out_dir / "trace.csv",
                  artifact_header(config) + trace_to_csv(trace, &inst.x_star));
  nlohmann::json summary{{"version", version_string()},
                         {"config", config_to_json(config)},
                         {"rel_latent_err", rel_err},
                         {"reconstruction_err", recon},
                         {"final_f", trace.final_f},
                         {"status", to_string(trace.status)},
                         {"iterations", trace.iterations()},
                         {"convergence_rate", trace.convergence_rate}};
  write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
  std::cout << "solve: rel_err=" << rel_err << " f=" << trace.final_f << " status="
            << to_string(trace.status) << " -> " << (out_dir / "trace.csv").string() << "\n";
  return guard.ok ? kExitOk : kExitNumeric;
}

int run_sweep(const ExperimentConfig& config) {
  std::vector<SweepPoint> points = phase_transition_sweep(config);
  FiniteGuard guard;
  std::ostringstream csv;
  csv.precision(17);
  csv << artifact_header(config) << "m,success_rate,mean_rel_err,trials\n";
  for (const auto& p : points)
    csv << p.m << "," << guard.check(p.success_rate) << "," << guard.check(p.mean_rel_err)
        << "," << p.trials << "\n";
  write_text_file(fs::path(config.out_dir) / "sweep.csv", csv.str());
  std::cout << "sweep: " << points.size() << " grid points -> "
            << (fs::path(config.out_dir) / "sweep.csv").string() << "\n";
  return guard.ok ? kExitOk : kExitNumeric;
}

int run_landscape(const ExperimentConfig& config) {
  if (config.dims.k != 2) throw ConfigError("landscape scans require k = 2");
  ProblemInstance inst = instance_from_config(config, config.seed);
  const int d = inst.depth();
  const int res = config.grid_resolution;
  const double range = config.grid_range;
  FiniteGuard guard;
  std::ostringstream csv;
  csv.precision(17);
  csv << artifact_header(config) << "x1,x2,F,f,h_norm,v_norm\n";
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      Eigen::Vector2d x(-range + 2.0 * range * i / (res - 1),
                        -range + 2.0 * range * j / (res - 1));
      if (x.norm() < 1e-3) continue;  // origin ball excluded from scans
      const double F = guard.check(idealized_loss(x, inst.x_star, d));
      const double f = guard.check(objective(inst, x));
      const double hn = guard.check(h_direction(x, inst.x_star, d).norm());
      const double vn = guard.check(subgradient(inst, x).v.norm());
      csv << x[0] << "," << x[1] << "," << F << "," << f << "," << hn << "," << vn << "\n";
    }
  }
  write_text_file(fs::path(config.out_dir) / "landscape.csv", csv.str());
  std::cout << "landscape: " << res << "x" << res << " grid -> "
            << (fs::path(config.out_dir) / "landscape.csv").string() << "\n";
  return guard.ok ? kExitOk : kExitNumeric;
}

void append_report_stats(std::ostringstream& csv, const std::string& key, int value,
                         const DeviationReport& report, FiniteGuard& guard) {
  csv << key << "," << value << ",p50," << guard.check(report.p50) << "\n";
  csv << key << "," << value << ",p95," << guard.check(report.p95) << "\n";
  csv << key << "," << value << ",max," << guard.check(report.max_dev) << "\n";
  csv << key << "," << value << ",mean," << guard.check(report.mean_dev) << "\n";
}

int run_verify_wdc(const ExperimentConfig& config) {
  if (config.dims.k < 1) throw ConfigError("k must be positive");
  std::vector<int> widths = config.width_grid;
  if (widths.empty()) {
    if (config.dims.layer_dims.empty()) throw ConfigError("no widths given");
    widths.push_back(config.dims.layer_dims.front());
  }
  FiniteGuard guard;
  nlohmann::json reports = nlohmann::json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << artifact_header(config) << "op,width,stat,value\n";
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const int n = widths[i];
    if (n <= config.dims.k) throw ConfigError("width must exceed k");
    Rng rng = make_rng(split_seed(config.seed, 200 + i));
    Eigen::MatrixXd w = gaussian_matrix(n, config.dims.k, 1.0 / std::sqrt(double(n)), rng);
    DeviationReport report = wdc_deviation(w, config.num_pairs, config.seed);
    reports.push_back(report_to_json(report));
    append_report_stats(csv, "wdc", n, report, guard);
  }
  const fs::path out_dir(config.out_dir);
  write_text_file(out_dir / "wdc_report.json",
                  nlohmann::json{{"version", version_string()},
                                 {"config", config_to_json(config)},
                                 {"reports", reports}}
                          .dump(2) +
                      "\n");
  write_text_file(out_dir / "wdc_quantiles.csv", csv.str());
  std::cout << "verify-wdc: " << widths.size() << " widths -> "
            << (out_dir / "wdc_report.json").string() << "\n";
  return guard.ok ? kExitOk : kExitNumeric;
}

int run_verify_rrcp(const ExperimentConfig& config) {
  if (!config.dims.valid()) throw ConfigError("invalid network dims");
  std::vector<int> ms = config.m_grid;
  if (ms.empty()) {
    if (config.m < 1) throw ConfigError("m must be positive");
    ms.push_back(config.m);
  }
  GeneratorNet net = sample_gaussian_net(config.dims, split_seed(config.seed, 100));
  FiniteGuard guard;
  nlohmann::json reports = nlohmann::json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << artifact_header(config) << "op,m,stat,value\n";
  for (int m : ms) {
    MeasurementEnsemble ens =
        sample_measurements(m, net.output_dim(), split_seed(config.seed, 102));
    DeviationReport rrcp = rrcp_deviation(ens, net, config.num_tuples, config.seed);
    DeviationReport angles = angle_distortion_check(ens, net, config.num_pairs, config.seed);
    reports.push_back(
        {{"m", m}, {"rrcp", report_to_json(rrcp)}, {"angle", report_to_json(angles)}});
    append_report_stats(csv, "rrcp", m, rrcp, guard);
    append_report_stats(csv, "angle", m, angles, guard);
  }
  const fs::path out_dir(config.out_dir);
  write_text_file(out_dir / "rrcp_report.json",
                  nlohmann::json{{"version", version_string()},
                                 {"config", config_to_json(config)},
                                 {"reports", reports}}
                          .dump(2) +
                      "\n");
  write_text_file(out_dir / "rrcp_quantiles.csv", csv.str());
  std::cout << "verify-rrcp: " << ms.size() << " ensembles -> "
            << (out_dir / "rrcp_report.json").string() << "\n";
  return guard.ok ? kExitOk : kExitNumeric;
}

int run_tessellate(const ExperimentConfig& config) {
  if (config.ell < 1) throw ConfigError("ell must be positive");
  std::vector<int> ms = config.m_grid;
  if (ms.empty()) {
    if (config.m < 1) throw ConfigError("m must be positive");
    ms.push_back(config.m);
  }
  FiniteGuard guard;
  std::ostringstream csv;
  csv.precision(17);
  csv << artifact_header(config) << "m,ell,count,exact,sphere_covering,bound_10m2k\n";
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const int m = ms[i];
    Rng rng = make_rng(split_seed(config.seed, 300 + i));
    Eigen::MatrixXd a_sub =
        gaussian_matrix(m, config.ell, 1.0 / std::sqrt(double(m)), rng);
    TessellationResult res = tessellation_count(a_sub, config.ell, 100000, config.seed);
    csv << m << "," << config.ell << "," << res.count << "," << (res.exact ? 1 : 0) << ","
        << res.sphere_covering << "," << guard.check(res.bound_10m2k) << "\n";
  }
  write_text_file(fs::path(config.out_dir) / "tessellation.csv", csv.str());
  std::cout << "tessellate: " << ms.size() << " sizes -> "
            << (fs::path(config.out_dir) / "tessellation.csv").string() << "\n";
  return guard.ok ? kExitOk : kExitNumeric;
}

int run_compare(const ExperimentConfig& config) {
  if (!config.dims.valid()) throw ConfigError("invalid network dims");
  if (config.m_grid.empty()) throw ConfigError("compare requires m_grid");
  GenerativeFamily gen{config.dims, config.solver};
  SparseFamily sparse;
  sparse.n = config.dims.output_dim();
  sparse.solver.sparsity = config.sparsity > 0 ? config.sparsity : config.dims.k;
  std::vector<CompareRow> rows = sweep_compare(gen, sparse, config.m_grid, config.trials,
                                               config.seed, 0.05, config.workers);
  FiniteGuard guard;
  for (const auto& r : rows) {
    guard.check(r.mean_err);
    guard.check(r.success_rate);
  }
  write_text_file(fs::path(config.out_dir) / "compare.csv",
                  artifact_header(config) + compare_to_csv(rows));
  std::cout << "compare: " << config.m_grid.size() << " grid points -> "
            << (fs::path(config.out_dir) / "compare.csv").string() << "\n";
  return guard.ok ? kExitOk : kExitNumeric;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::solve: return "solve";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::landscape: return "landscape";
    case ExperimentKind::verify_wdc: return "verify-wdc";
    case ExperimentKind::verify_rrcp: return "verify-rrcp";
    case ExperimentKind::tessellate: return "tessellate";
    case ExperimentKind::compare: return "compare";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (auto kind : {ExperimentKind::solve, ExperimentKind::sweep, ExperimentKind::landscape,
                    ExperimentKind::verify_wdc, ExperimentKind::verify_rrcp,
                    ExperimentKind::tessellate, ExperimentKind::compare})
    if (to_string(kind) == name) return kind;
  throw ConfigError("unknown experiment kind: " + name);
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["kind"] = to_string(config.kind);
  j["dims"] = {{"k", config.dims.k}, {"layers", config.dims.layer_dims}};
  j["m"] = config.m;
  j["noise_level"] = config.noise_level;
  j["solver"] = {{"step_size", config.solver.step_size},
                 {"max_iters", config.solver.max_iters},
                 {"grad_tol", config.solver.grad_tol},
                 {"restarts", config.solver.restarts},
                 {"variant", config.solver.variant == SolverVariant::adaptive_moment
                                 ? "adaptive_moment"
                                 : "plain_subgradient"},
                 {"negation", config.solver.negation}};
  j["trials"] = config.trials;
  j["seed"] = config.seed;
  j["out"] = config.out_dir;
  j["workers"] = config.workers;
  j["num_pairs"] = config.num_pairs;
  j["num_tuples"] = config.num_tuples;
  j["ell"] = config.ell;
  j["m_grid"] = config.m_grid;
  j["width_grid"] = config.width_grid;
  j["grid_resolution"] = config.grid_resolution;
  j["grid_range"] = config.grid_range;
  j["success_threshold"] = config.success_threshold;
  j["sparsity"] = config.sparsity;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  try {
    config.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
    if (!j.contains("seed")) throw ConfigError("seed is mandatory");
    config.seed = j.at("seed").get<std::uint64_t>();
    config.seed_set = true;
    if (j.contains("dims")) {
      config.dims.k = j["dims"].value("k", 0);
      config.dims.layer_dims = j["dims"].value("layers", std::vector<int>{});
    }
    config.m = j.value("m", 0);
    config.noise_level = j.value("noise_level", 0.0);
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      config.solver.step_size = s.value("step_size", 0.0);
      config.solver.max_iters = s.value("max_iters", 2000);
      config.solver.grad_tol = s.value("grad_tol", 1e-9);
      config.solver.restarts = s.value("restarts", 1);
      config.solver.negation = s.value("negation", true);
      const std::string variant = s.value("variant", "plain_subgradient");
      if (variant == "adaptive_moment")
        config.solver.variant = SolverVariant::adaptive_moment;
      else if (variant == "plain_subgradient")
        config.solver.variant = SolverVariant::plain_subgradient;
      else
        throw ConfigError("unknown solver variant: " + variant);
    }
    config.trials = j.value("trials", 1);
    config.out_dir = j.value("out", std::string("."));
    config.workers = j.value("workers", 1);
    config.num_pairs = j.value("num_pairs", 200);
    config.num_tuples = j.value("num_tuples", 64);
    config.ell = j.value("ell", 2);
    config.m_grid = j.value("m_grid", std::vector<int>{});
    config.width_grid = j.value("width_grid", std::vector<int>{});
    config.grid_resolution = j.value("grid_resolution", 128);
    config.grid_range = j.value("grid_range", 2.0);
    config.success_threshold = j.value("success_threshold", 1e-2);
    config.sparsity = j.value("sparsity", 0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (config.trials < 1) throw ConfigError("trials must be at least 1");
  if (config.workers < 1) throw ConfigError("workers must be at least 1");
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

void apply_overrides(ExperimentConfig& config, const ConfigOverrides& overrides) {
  if (overrides.seed) {
    config.seed = *overrides.seed;
    config.seed_set = true;
  }
  if (overrides.out_dir) config.out_dir = *overrides.out_dir;
  if (overrides.workers) config.workers = *overrides.workers;
}

const char* version_string() { return DPR_VERSION_STRING; }

std::vector<SweepPoint> phase_transition_sweep(const ExperimentConfig& config) {
  if (config.m_grid.empty()) throw ConfigError("sweep requires a nonempty m_grid");
  if (!config.dims.valid()) throw ConfigError("invalid network dims");
  std::vector<SweepPoint> points;
  for (std::size_t mi = 0; mi < config.m_grid.size(); ++mi) {
    const int m = config.m_grid[mi];
    std::vector<double> errs(config.trials, 1.0);
    parallel_for_indexed(config.trials, config.workers, [&](int t) {
      const std::uint64_t trial_seed = split_seed(config.seed, mi * 100000 + t);
      ExperimentConfig local = config;
      local.m = m;
      ProblemInstance inst = instance_from_config(local, trial_seed, m);
      SolverConfig solver = config.solver;
      solver.seed = split_seed(trial_seed, 104);
      IterateTrace trace = run_restarts(inst, solver);
      errs[t] = relative_latent_error(trace.final_x, inst.x_star);
    });
    SweepPoint p;
    p.m = m;
    p.trials = config.trials;
    for (double e : errs) {
      p.mean_rel_err += e / config.trials;
      if (e < config.success_threshold) p.success_rate += 1.0 / config.trials;
    }
    points.push_back(p);
  }
  return points;
}

int run(const ExperimentConfig& config) {
  try {
    if (!config.seed_set) throw ConfigError("seed is mandatory");
    fs::create_directories(config.out_dir);
    switch (config.kind) {
      case ExperimentKind::solve: return run_solve(config);
      case ExperimentKind::sweep: return run_sweep(config);
      case ExperimentKind::landscape: return run_landscape(config);
      case ExperimentKind::verify_wdc: return run_verify_wdc(config);
      case ExperimentKind::verify_rrcp: return run_verify_rrcp(config);
      case ExperimentKind::tessellate: return run_tessellate(config);
      case ExperimentKind::compare: return run_compare(config);
    }
    throw ConfigError("unhandled experiment kind");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DimsError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace dpr
