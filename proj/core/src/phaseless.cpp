#include "dpr/phaseless.hpp"

#include <cmath>
#include <stdexcept>

#include "dpr/rng.hpp"

namespace dpr {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegenerateSin = 1e-9;
constexpr double kAcosClamp = 1e-12;

double clamped_acos(double u) {
  if (u > 1.0) {
    if (u > 1.0 + kAcosClamp) throw DomainError("acos argument above 1 beyond clamp tolerance");
    u = 1.0;
  } else if (u < -1.0) {
    if (u < -1.0 - kAcosClamp) throw DomainError("acos argument below -1 beyond clamp tolerance");
    u = -1.0;
  }
  return std::acos(u);
}
}  // namespace

MeasurementEnsemble sample_measurements(int m, int n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw DimsError("measurement dims must be positive");
  Rng rng = make_rng(split_seed(seed, 0));
  return MeasurementEnsemble{gaussian_matrix(m, n, 1.0 / std::sqrt(double(m)), rng)};
}

PhaselessObservation observe(const Eigen::MatrixXd& a, const Eigen::VectorXd& y_star,
                             const Eigen::VectorXd& eta) {
  if (a.cols() != y_star.size()) throw DimsError("signal length does not match ensemble");
  if (eta.size() != a.rows()) throw DimsError("noise length does not match measurement count");
  PhaselessObservation obs;
  obs.b = (a * y_star).cwiseAbs() + eta;
  obs.eta = eta;
  return obs;
}

Eigen::VectorXd sign_vector(const Eigen::VectorXd& v) {
  Eigen::VectorXd s(v.size());
  for (int i = 0; i < v.size(); ++i) s[i] = sgn0(v[i]);
  return s;
}

Eigen::VectorXd sign_matrix_apply(const Eigen::MatrixXd& a, const Eigen::VectorXd& z,
                                  const Eigen::VectorXd& v) {
  if (z.size() != a.cols() || v.size() != a.cols())
    throw DimsError("sign_matrix_apply expects signals of length n");
  Eigen::VectorXd az = a * z;
  Eigen::VectorXd av = a * v;
  for (int i = 0; i < av.size(); ++i) av[i] *= sgn0(az[i]);
  return av;
}

Eigen::VectorXd SwapReflector::apply(const Eigen::VectorXd& v) const {
  if (sign_degenerate != 0.0) return sign_degenerate * (x_hat.dot(v)) * x_hat;
  return -d1.dot(v) * d1 + d2.dot(v) * d2;
}

Eigen::MatrixXd SwapReflector::dense() const {
  if (sign_degenerate != 0.0) return sign_degenerate * (x_hat * x_hat.transpose());
  return -(d1 * d1.transpose()) + d2 * d2.transpose();
}

SwapReflector swap_matrix(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& y_hat) {
  if (std::abs(x_hat.norm() - 1.0) > 1e-8 || std::abs(y_hat.norm() - 1.0) > 1e-8)
    throw DomainError("swap_matrix expects unit-norm inputs");
  const double theta = angle_between(x_hat, y_hat);
  SwapReflector m;
  m.x_hat = x_hat;
  if (std::sin(theta) < kDegenerateSin) {
    m.sign_degenerate = theta < kPi / 2 ? 1.0 : -1.0;
    return m;
  }
  Eigen::VectorXd d1 = y_hat - x_hat;
  Eigen::VectorXd d2 = y_hat + x_hat;
  m.d1 = d1 / d1.norm();
  m.d2 = d2 / d2.norm();
  return m;
}

Eigen::VectorXd PhiOperator::apply(const Eigen::VectorXd& v) const {
  if (zero) return Eigen::VectorXd::Zero(v.size());
  return identity_coef * v + swap_coef * swap.apply(v);
}

Eigen::MatrixXd PhiOperator::dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  if (zero) return out;
  out = identity_coef * Eigen::MatrixXd::Identity(dim, dim) + swap_coef * swap.dense();
  return out;
}

PhiOperator phi_operator(const Eigen::VectorXd& z, const Eigen::VectorXd& w) {
  PhiOperator phi;
  phi.dim = static_cast<int>(z.size());
  if (z.norm() == 0.0 || w.norm() == 0.0) {
    phi.zero = true;
    return phi;
  }
  const double theta = angle_between(z, w);
  phi.identity_coef = (kPi - 2.0 * theta) / kPi;
  phi.swap_coef = 2.0 * std::sin(theta) / kPi;
  phi.swap = swap_matrix(z / z.norm(), w / w.norm());
  return phi;
}

Eigen::MatrixXd phi_matrix(const Eigen::VectorXd& z, const Eigen::VectorXd& w) {
  return phi_operator(z, w).dense();
}

Eigen::MatrixXd q_matrix(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.norm() == 0.0 || y.norm() == 0.0) throw DomainError("q_matrix expects nonzero inputs");
  const double theta = angle_between(x, y);
  const int k = static_cast<int>(x.size());
  SwapReflector m = swap_matrix(x / x.norm(), y / y.norm());
  return (kPi - theta) / (2.0 * kPi) * Eigen::MatrixXd::Identity(k, k) +
         std::sin(theta) / (2.0 * kPi) * m.dense();
}

double varphi(double theta) {
  if (theta < 0.0 || theta > kPi) throw DomainError("varphi expects theta in [0, pi]");
  const double u = ((kPi - 2.0 * theta) * std::cos(theta) + 2.0 * std::sin(theta)) / kPi;
  return clamped_acos(u);
}

}  // namespace dpr
