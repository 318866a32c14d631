#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpr/solver.hpp"

namespace dpr {

struct SparseSolverConfig {
  int sparsity = 1;
  double step = 0.5;
  int iters = 400;
  int init_samples = 60;  // power-iteration count for the spectral start
};

// Amplitude-flow gradient descent with per-step hard thresholding to the s
// largest magnitudes; spectral initialization by power iteration on the
// b^2-weighted A^T A. Output is sign-ambiguous.
Eigen::VectorXd thresholded_amplitude_flow(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                           const SparseSolverConfig& config);

// min(||y_hat - y||, ||y_hat + y||) / ||y||.
double sign_resolved_error(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y);

// s nonzeros at uniform positions, Gaussian magnitudes, unit norm.
Eigen::VectorXd sample_sparse_signal(int n, int sparsity, std::uint64_t seed);

struct GenerativeFamily {
  NetworkDims dims;
  SolverConfig solver;
};
struct SparseFamily {
  int n = 0;
  SparseSolverConfig solver;
};

struct CompareRow {
  int m = 0;
  std::string algo;
  double mean_err = 0.0;
  double success_rate = 0.0;
  int trials = 0;
};

// Fig.-2-style protocol on synthetic signals of matched intrinsic dimension:
// per m, mean sign-resolved reconstruction error and success rate for the
// generative solver against the sparse baseline. Trials run in parallel with
// disjoint seed streams; results are worker-count independent.
std::vector<CompareRow> sweep_compare(const GenerativeFamily& generative,
                                      const SparseFamily& sparse,
                                      const std::vector<int>& m_grid, int trials,
                                      std::uint64_t seed, double success_threshold = 0.05,
                                      int workers = 1);

std::string compare_to_csv(const std::vector<CompareRow>& rows);

}  // namespace dpr
