#include "dpr/landscape.hpp"

#include <cmath>

namespace dpr {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Lambda_x^T u through the masked transpose chain, reusing forward masks.
Eigen::VectorXd jacobian_transpose_apply(
    const GeneratorNet& net, const std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>>& masks,
    Eigen::VectorXd u) {
  for (int i = net.depth() - 1; i >= 0; --i) {
    for (int r = 0; r < u.size(); ++r)
      if (!masks[i][r]) u[r] = 0.0;
    u = net.weights[i].transpose() * u;
  }
  return u;
}

}  // namespace

ProblemInstance make_instance(GeneratorNet net, MeasurementEnsemble ensemble,
                              Eigen::VectorXd x_star, const Eigen::VectorXd& eta) {
  if (ensemble.n() != net.output_dim())
    throw DimsError("ensemble signal dimension must equal the network output dimension");
  ProblemInstance inst;
  inst.obs = observe(ensemble.a, forward(net, x_star), eta);
  inst.net = std::move(net);
  inst.ensemble = std::move(ensemble);
  inst.x_star = std::move(x_star);
  return inst;
}

ProblemInstance make_noiseless_instance(GeneratorNet net, MeasurementEnsemble ensemble,
                                        Eigen::VectorXd x_star) {
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(ensemble.m());
  return make_instance(std::move(net), std::move(ensemble), std::move(x_star), eta);
}

double objective(const ProblemInstance& inst, const Eigen::VectorXd& x) {
  Eigen::VectorXd r = (inst.ensemble.a * forward(inst.net, x)).cwiseAbs() - inst.obs.b;
  return 0.5 * r.squaredNorm();
}

std::vector<Eigen::VectorXd> layer_preactivations(const GeneratorNet& net,
                                                  const Eigen::VectorXd& x) {
  std::vector<Eigen::VectorXd> pre;
  pre.reserve(net.depth());
  Eigen::VectorXd z = x;
  for (const auto& w : net.weights) {
    pre.push_back(w * z);
    z = pre.back().cwiseMax(0.0);
  }
  return pre;
}

DescentDirection subgradient(const ProblemInstance& inst, const Eigen::VectorXd& x) {
  if (x.norm() == 0.0)
    throw DomainError("subgradient at x = 0 is rejected; the Lambda convention is ambiguous");

  DescentDirection dir;
  std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>> masks;
  masks.reserve(inst.net.depth());
  Eigen::VectorXd z = x;
  for (const auto& w : inst.net.weights) {
    Eigen::VectorXd pre = w * z;
    for (int r = 0; r < pre.size(); ++r)
      if (pre[r] == 0.0) dir.differentiable = false;
    masks.push_back(pre.array() > 0.0);
    z = pre.cwiseMax(0.0);
  }

  Eigen::VectorXd az = inst.ensemble.a * z;
  Eigen::VectorXd u(az.size());
  for (int i = 0; i < az.size(); ++i) {
    if (az[i] == 0.0) dir.differentiable = false;
    u[i] = sgn0(az[i]) * (std::abs(az[i]) - inst.obs.b[i]);
  }
  dir.v = jacobian_transpose_apply(inst.net, masks, inst.ensemble.a.transpose() * u);
  return dir;
}

Eigen::VectorXd h_direction(const Eigen::VectorXd& x, const Eigen::VectorXd& x_star, int d) {
  const double r = x.norm(), rs = x_star.norm();
  if (r == 0.0 || rs == 0.0) throw DomainError("h_direction expects nonzero inputs");
  AngleProfile p = angle_profile(x, x_star, d);
  double sum = 0.0;
  for (int i = 0; i < d; ++i) sum += std::sin(p.theta_bar[i]) / kPi * p.zeta[i + 1];
  const double scale = std::ldexp(1.0, -d);
  const double radial = r - rs * (2.0 * std::sin(p.theta_bar[d]) / kPi + p.psi_d * sum);
  return scale * (-p.psi_d * p.zeta[0] * rs * (x_star / rs) + radial * (x / r));
}

Eigen::VectorXd w_direction(const ProblemInstance& inst, const Eigen::VectorXd& x) {
  if (x.norm() == 0.0) throw DomainError("w_direction expects nonzero input");
  auto masks = activation_masks(inst.net, x);
  Eigen::VectorXd gx = forward(inst.net, x);
  Eigen::VectorXd gs = forward(inst.net, inst.x_star);
  PhiOperator phi = phi_operator(gx, gs);
  return jacobian_transpose_apply(inst.net, masks, gx - phi.apply(gs));
}

Eigen::VectorXd h_tilde(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int d) {
  const double nx = x.norm(), ny = y.norm();
  if (nx == 0.0 || ny == 0.0) throw DomainError("h_tilde expects nonzero inputs");
  AngleProfile p = angle_profile(x, y, d);
  double sum = 0.0;
  for (int i = 0; i < d; ++i) sum += std::sin(p.theta_bar[i]) / kPi * p.zeta[i + 1];
  return std::ldexp(1.0, -d) * (p.zeta[0] * y + sum * (ny / nx) * x);
}

double idealized_loss(const Eigen::VectorXd& x, const Eigen::VectorXd& x_star, int d) {
  const double r2 = x.squaredNorm(), rs2 = x_star.squaredNorm();
  if (rs2 == 0.0) throw DomainError("idealized_loss expects a nonzero x_star");
  // At x = 0 the angle is undefined but the limit is direction-free.
  if (r2 == 0.0) return 0.5 * std::ldexp(rs2, -d);
  AngleProfile p = angle_profile(x, x_star, d);
  double sum = 0.0;
  for (int i = 0; i < d; ++i) sum += std::sin(p.theta_bar[i]) / kPi * p.zeta[i + 1];
  const double scale = std::ldexp(1.0, -d);
  return 0.5 * scale * (r2 + rs2) - scale * p.psi_d * p.zeta[0] * x.dot(x_star) -
         scale * (2.0 * std::sin(p.theta_bar[d]) / kPi + p.psi_d * sum) * std::sqrt(r2 * rs2);
}

bool s_beta_membership(const Eigen::VectorXd& x, const Eigen::VectorXd& x_star, int d,
                       double beta) {
  if (x.norm() == 0.0) throw DomainError("s_beta_membership expects nonzero x");
  if (beta <= 0.0) throw DomainError("beta must be positive");
  const double bound = beta * std::ldexp(1.0, -d) * std::max(x.norm(), x_star.norm());
  return h_direction(x, x_star, d).norm() <= bound;
}

}  // namespace dpr
