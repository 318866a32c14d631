#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dpr/landscape.hpp"

namespace dpr {

// Monte-Carlo estimate of a sup-norm condition: distribution statistics over
// sampled witnesses, a lower bound on the true sup, never a certificate.
struct DeviationReport {
  int samples = 0;
  double max_dev = 0.0;
  double mean_dev = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  nlohmann::json config;  // echo of dims, seeds, sample counts
};

nlohmann::json report_to_json(const DeviationReport& report);
DeviationReport make_report(std::vector<double> deviations, nlohmann::json config);

// Largest singular value; dense SVD up to 256 on the short side, power
// iteration (200 iterations, tol 1e-9) beyond that.
double spectral_norm(const Eigen::MatrixXd& m);

// sup-style statistics of || W_{+,x}^T W_{+,y} - Q_{x,y} || over random unit
// pairs plus the structured pairs (coordinate axes, antipodal, nearly
// parallel at angle 1e-3). Optional fixed rotation of the sampled latent
// directions for invariance probing.
DeviationReport wdc_deviation(const Eigen::MatrixXd& w, int num_pairs, std::uint64_t seed,
                              const Eigen::MatrixXd* latent_rotation = nullptr);

// |<(A_z^T A_w - Phi_{z,w})(G(x1)-G(x2)), G(x3)-G(x4)>| normalized by
// L ||G(x1)-G(x2)|| ||G(x3)-G(x4)|| with L = 33, over random and structured
// latent tuples. Degenerate tuples are resampled.
DeviationReport rrcp_deviation(const MeasurementEnsemble& ensemble, const GeneratorNet& net,
                               int num_tuples, std::uint64_t seed);
inline constexpr double kRrcpL = 33.0;

// |cos angle(A_z z, A_w w) - cos varphi(angle(z, w))| for z = G(x), w = G(y).
DeviationReport angle_distortion_check(const MeasurementEnsemble& ensemble,
                                       const GeneratorNet& net, int num_pairs,
                                       std::uint64_t seed);

struct TessellationResult {
  std::int64_t count = 0;
  bool exact = false;             // false => random-probe lower bound
  std::int64_t sphere_covering = 0;  // 2 sum_{i<ell} C(m-1, i)
  double bound_10m2k = 0.0;       // 10 m^{2 ell}
};

// Sign patterns of diag(sgn(A v)) over a subspace of dimension ell; `a_sub`
// holds the rows of A projected onto an orthonormal basis of the subspace
// (m x ell). ell in {1, 2} is enumerated exactly (angular sweep for 2);
// larger ell falls back to a random-probe lower bound.
TessellationResult tessellation_count(const Eigen::MatrixXd& a_sub, int ell,
                                      int num_probes = 100000, std::uint64_t seed = 0);

// Zero-free sign patterns from the ell = 2 sweep, one vector of +/-1 per
// full-dimensional region.
std::set<std::vector<int>> tessellation_patterns_2d(const Eigen::MatrixXd& a_sub);

std::int64_t sphere_covering_bound(std::int64_t m, int ell);

// ||A_Omega B|| for the row subset Omega and an orthonormal subspace basis B.
double restricted_norm(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                       const Eigen::MatrixXd& basis);

// Ratios ||A_Omega B|| / (sqrt(|Omega|/m) + sqrt(k/m)) over random subsets
// and a random k-dimensional subspace.
DeviationReport submatrix_spectral_check(const Eigen::MatrixXd& a, int subspace_dim,
                                         int max_rows, int trials, std::uint64_t seed);

// 2^d ||v_x - h_x|| / max(||x||, ||x_*||) over random x on spheres of radius
// {0.5, 1, 2} ||x_*||.
DeviationReport subgradient_vs_h(const ProblemInstance& inst, int num_points,
                                 std::uint64_t seed);

}  // namespace dpr
