#include "dpr/generator.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "dpr/rng.hpp"

namespace dpr {

namespace {

constexpr double kPi = 3.14159265358979323846;
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

bool NetworkDims::valid() const {
  if (k < 1 || layer_dims.empty()) return false;
  int prev = k;
  for (int n : layer_dims) {
    if (n <= prev) return false;
    prev = n;
  }
  return true;
}

GeneratorNet sample_gaussian_net(const NetworkDims& dims, std::uint64_t seed) {
  if (!dims.valid()) throw DimsError("network dims must satisfy k = n_0 < n_1 < ... < n_d");
  GeneratorNet net;
  net.dims = dims;
  net.weights.reserve(dims.layer_dims.size());
  int prev = dims.k;
  for (std::size_t i = 0; i < dims.layer_dims.size(); ++i) {
    const int n_i = dims.layer_dims[i];
    Rng rng = make_rng(split_seed(seed, i));
    net.weights.push_back(gaussian_matrix(n_i, prev, 1.0 / std::sqrt(double(n_i)), rng));
    prev = n_i;
  }
  return net;
}

Eigen::VectorXd forward(const GeneratorNet& net, const Eigen::VectorXd& x) {
  if (x.size() != net.latent_dim()) throw DimsError("latent vector has wrong dimension");
  Eigen::VectorXd z = x;
  for (const auto& w : net.weights) z = (w * z).cwiseMax(0.0);
  return z;
}

std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>> activation_masks(const GeneratorNet& net,
                                                                    const Eigen::VectorXd& x) {
  if (x.size() != net.latent_dim()) throw DimsError("latent vector has wrong dimension");
  std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>> masks;
  masks.reserve(net.weights.size());
  Eigen::VectorXd z = x;
  for (const auto& w : net.weights) {
    Eigen::VectorXd pre = w * z;
    masks.push_back(pre.array() > 0.0);
    z = pre.cwiseMax(0.0);
  }
  return masks;
}

Eigen::MatrixXd active_weights(const GeneratorNet& net, const Eigen::VectorXd& x, int layer) {
  if (layer < 1 || layer > net.depth()) throw DimsError("layer index out of range");
  Eigen::VectorXd z = x;
  for (int i = 0; i + 1 < layer; ++i) z = (net.weights[i] * z).cwiseMax(0.0);
  const Eigen::MatrixXd& w = net.weights[layer - 1];
  Eigen::VectorXd pre = w * z;
  Eigen::MatrixXd out = w;
  for (int r = 0; r < out.rows(); ++r)
    if (!(pre[r] > 0.0)) out.row(r).setZero();
  return out;
}

Eigen::MatrixXd end_to_end_jacobian(const GeneratorNet& net, const Eigen::VectorXd& x) {
  if (x.size() != net.latent_dim()) throw DimsError("latent vector has wrong dimension");
  Eigen::VectorXd z = x;
  Eigen::MatrixXd jac;  // masked running product, n_i x k
  for (std::size_t i = 0; i < net.weights.size(); ++i) {
    const Eigen::MatrixXd& w = net.weights[i];
    Eigen::VectorXd pre = w * z;
    Eigen::MatrixXd next = (i == 0) ? w : Eigen::MatrixXd(w * jac);
    for (int r = 0; r < next.rows(); ++r)
      if (!(pre[r] > 0.0)) next.row(r).setZero();
    jac = std::move(next);
    z = pre.cwiseMax(0.0);
  }
  return jac;
}

double g_theta(double theta) {
  if (theta < 0.0 || theta > kPi) throw DomainError("g_theta expects theta in [0, pi]");
  const double u = ((kPi - theta) * std::cos(theta) + std::sin(theta)) / kPi;
  return clamped_acos(u);
}

double angle_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw DomainError("angle of a zero vector is undefined");
  const Eigen::VectorXd ah = a / na, bh = b / nb;
  // 2 atan2(||ah-bh||, ||ah+bh||) is stable at both ends of [0, pi].
  return 2.0 * std::atan2((ah - bh).norm(), (ah + bh).norm());
}

namespace {

AngleProfile profile_from_theta0(double theta0, int d, bool with_breve) {
  AngleProfile p;
  p.theta_bar.resize(d + 1);
  p.theta_bar[0] = theta0;
  for (int i = 1; i <= d; ++i) p.theta_bar[i] = g_theta(p.theta_bar[i - 1]);
  p.psi_d = (kPi - 2.0 * p.theta_bar[d]) / kPi;
  p.zeta.assign(d + 1, 1.0);
  for (int i = d - 1; i >= 0; --i)
    p.zeta[i] = p.zeta[i + 1] * (kPi - p.theta_bar[i]) / kPi;
  if (with_breve) {
    std::vector<double> breve(d + 1);
    breve[0] = kPi;
    for (int i = 1; i <= d; ++i) breve[i] = g_theta(breve[i - 1]);
    p.breve = std::move(breve);
  }
  return p;
}

}  // namespace

AngleProfile angle_profile(const Eigen::VectorXd& x, const Eigen::VectorXd& x_star, int d,
                           bool with_breve) {
  if (d < 1) throw DomainError("depth must be at least 1");
  return profile_from_theta0(angle_between(x, x_star), d, with_breve);
}

std::pair<double, double> rho_d(int d) {
  if (d < 1) throw DomainError("depth must be at least 1");
  static std::map<int, std::pair<double, double>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(d);
  if (it != cache.end()) return it->second;

  std::vector<double> breve(d + 1);
  breve[0] = kPi;
  for (int i = 1; i <= d; ++i) breve[i] = g_theta(breve[i - 1]);
  double gamma = 0.0;
  for (int i = 0; i < d; ++i) {
    double prod = 1.0;
    for (int j = i + 1; j < d; ++j) prod *= (kPi - breve[j]) / kPi;
    gamma += std::sin(breve[i]) / kPi * prod;
  }
  const double rho = 2.0 * std::sin(breve[d]) / kPi + (kPi - 2.0 * breve[d]) / kPi * gamma;
  auto value = std::make_pair(rho, gamma);
  cache.emplace(d, value);
  return value;
}

}  // namespace dpr
