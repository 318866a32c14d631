#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpr/baselines.hpp"
#include "dpr/conditions.hpp"
#include "dpr/parallel.hpp"
#include "dpr/solver.hpp"

namespace dpr {

enum class ExperimentKind { solve, sweep, landscape, verify_wdc, verify_rrcp, tessellate, compare };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::solve;
  NetworkDims dims;
  int m = 0;
  double noise_level = 0.0;  // ||eta|| as a fraction of 2^{-d/2} ||x_*||
  SolverConfig solver;
  int trials = 1;
  std::uint64_t seed = 0;
  bool seed_set = false;  // seed is mandatory in config files
  std::string out_dir = ".";
  int workers = 1;

  // op-specific knobs
  int num_pairs = 200;
  int num_tuples = 64;
  int ell = 2;
  std::vector<int> m_grid;
  std::vector<int> width_grid;
  int grid_resolution = 128;
  double grid_range = 2.0;
  double success_threshold = 1e-2;
  int sparsity = 0;  // 0 => match latent dimension
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// CLI-style overrides applied on top of a config file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> workers;
};
void apply_overrides(ExperimentConfig& config, const ConfigOverrides& overrides);

const char* version_string();

// exit codes: 0 success, 2 invalid config, 3 numeric failure (non-finite
// values in the artifacts).
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

int run(const ExperimentConfig& config);

struct SweepPoint {
  int m = 0;
  double success_rate = 0.0;
  double mean_rel_err = 0.0;
  int trials = 0;
};
std::vector<SweepPoint> phase_transition_sweep(const ExperimentConfig& config);

}  // namespace dpr
