#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpr/landscape.hpp"

namespace dpr {

enum class SolverVariant { plain_subgradient, adaptive_moment };

struct SolverConfig {
  // step_size <= 0 selects the default 2^d / (10 d^2).
  double step_size = 0.0;
  int max_iters = 2000;
  double grad_tol = 1e-9;
  int restarts = 1;
  SolverVariant variant = SolverVariant::plain_subgradient;
  std::uint64_t seed = 0;
  // Per-iteration negation check of Algorithm 1; disabled for the plain
  // descent used in the negation-necessity comparison.
  bool negation = true;
};

double default_step_size(int depth);

enum class TerminalStatus { converged, step_stagnated, max_iters, diverged };
std::string to_string(TerminalStatus s);

struct IterateRecord {
  int t = 0;
  Eigen::VectorXd x;  // iterate before the negation branch
  double f = 0.0;     // f(x_t)
  bool negated = false;
  double grad_norm = 0.0;  // ||v_{xbar_t}||
};

struct IterateTrace {
  std::vector<IterateRecord> records;
  Eigen::VectorXd final_x;
  double final_f = 0.0;
  TerminalStatus status = TerminalStatus::max_iters;
  // Least-squares slope of log f over the tail of the trace; negative in
  // converged runs.
  double convergence_rate = 0.0;
  // Diagnostics from the iterate-count bound; neither is asserted.
  double iter_bound_from_f_x0 = 0.0;
  double iter_bound_from_f_xstar = 0.0;

  int iterations() const { return static_cast<int>(records.size()); }
};

// One step of Algorithm 1: negate if f(-x) < f(x), then x <- xbar - alpha v.
struct StepResult {
  Eigen::VectorXd x_next;
  bool negated = false;
};
StepResult dpr_step(const ProblemInstance& inst, const Eigen::VectorXd& x_t, double alpha);

IterateTrace solve(const ProblemInstance& inst, const SolverConfig& config,
                   const Eigen::VectorXd& x0);

// Two descents from x0 and -x0 with no per-step negation; the branch with
// the smaller final f wins.
IterateTrace solve_two_branch(const ProblemInstance& inst, const SolverConfig& config,
                              const Eigen::VectorXd& x0);

// Independent Gaussian starts; picks the trace with the smallest
// reconstruction error (noiseless) or final f (noisy).
IterateTrace run_restarts(const ProblemInstance& inst, const SolverConfig& config);

// ||G(x_hat) - y_*|| / sqrt(n_d).
double reconstruction_error(const GeneratorNet& net, const Eigen::VectorXd& x_hat,
                            const Eigen::VectorXd& y_star);

// min(||x - x_*||, ||x + x_*||) / ||x_*||; solver output is sign-resolved by
// the negation step, the min guards the plain variant.
double relative_latent_error(const Eigen::VectorXd& x, const Eigen::VectorXd& x_star);

// CSV export: t, f, grad_norm, negated, rel_latent_err.
std::string trace_to_csv(const IterateTrace& trace, const Eigen::VectorXd* x_star);

}  // namespace dpr
