#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "dpr/generator.hpp"

namespace dpr {

// Gaussian measurement operator; entries intended i.i.d. N(0, 1/m).
struct MeasurementEnsemble {
  Eigen::MatrixXd a;

  int m() const { return static_cast<int>(a.rows()); }
  int n() const { return static_cast<int>(a.cols()); }
};

// b = |A y_*| + eta, stored exactly as constructed.
struct PhaselessObservation {
  Eigen::VectorXd b;
  Eigen::VectorXd eta;

  double noise_norm() const { return eta.norm(); }
};

MeasurementEnsemble sample_measurements(int m, int n, std::uint64_t seed);

PhaselessObservation observe(const Eigen::MatrixXd& a, const Eigen::VectorXd& y_star,
                             const Eigen::VectorXd& eta);

// Entrywise sgn with sgn(0) = 0.
inline double sgn0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }
Eigen::VectorXd sign_vector(const Eigen::VectorXd& v);

// A_z v = diag(sgn(Az)) A v without materializing the diagonal.
Eigen::VectorXd sign_matrix_apply(const Eigen::MatrixXd& a, const Eigen::VectorXd& z,
                                  const Eigen::VectorXd& v);

// M_{x <-> y}: sends x_hat to y_hat, y_hat to x_hat, and the orthogonal
// complement of span{x, y} to zero. Stored as the rank-2 eigenform
// -d1 d1^T + d2 d2^T with d1 = (y-x)/||y-x||, d2 = (y+x)/||y+x||; the
// degenerate angles 0 and pi collapse to +/- x_hat x_hat^T.
struct SwapReflector {
  Eigen::VectorXd d1, d2;  // unit eigenvectors for -1 / +1; either may be empty
  double sign_degenerate = 0.0;  // +1 => x x^T, -1 => -x x^T, 0 => generic
  Eigen::VectorXd x_hat;         // kept for the degenerate form

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd dense() const;
};

SwapReflector swap_matrix(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& y_hat);

// Phi_{z,w} = ((pi - 2 theta)/pi) I + (2 sin theta / pi) M_{z <-> w}; zero
// operator when either argument is zero. Canonical form is coefficient +
// rank-2; dense materialization is for small-n tests.
struct PhiOperator {
  double identity_coef = 0.0;
  double swap_coef = 0.0;
  SwapReflector swap;
  bool zero = false;
  int dim = 0;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd dense() const;
};

PhiOperator phi_operator(const Eigen::VectorXd& z, const Eigen::VectorXd& w);
Eigen::MatrixXd phi_matrix(const Eigen::VectorXd& z, const Eigen::VectorXd& w);

// Q_{x,y} = ((pi - theta)/(2 pi)) I_k + (sin theta/(2 pi)) M_{x <-> y}.
Eigen::MatrixXd q_matrix(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// varphi(theta) = arccos(((pi - 2 theta) cos theta + 2 sin theta)/pi).
double varphi(double theta);

}  // namespace dpr
