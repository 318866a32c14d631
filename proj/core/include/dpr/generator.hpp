#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace dpr {

// Layer sizes k = n_0 < n_1 < ... < n_d of a strictly expansive network.
struct NetworkDims {
  int k = 0;                    // latent dimension n_0
  std::vector<int> layer_dims;  // n_1 .. n_d

  int depth() const { return static_cast<int>(layer_dims.size()); }
  int output_dim() const { return layer_dims.empty() ? k : layer_dims.back(); }
  bool valid() const;
};

// Bias-free ReLU network: G(x) = relu(W_d ... relu(W_1 x) ...).
// Immutable after construction; safe for concurrent reads.
struct GeneratorNet {
  NetworkDims dims;
  std::vector<Eigen::MatrixXd> weights;  // W_i is n_i x n_{i-1}

  int latent_dim() const { return dims.k; }
  int output_dim() const { return dims.output_dim(); }
  int depth() const { return dims.depth(); }
};

// Latent-angle recursion attached to a pair (x, x_star) and a depth d.
struct AngleProfile {
  std::vector<double> theta_bar;  // theta_0 .. theta_d, each in [0, pi]
  double psi_d = 0.0;             // (pi - 2 theta_d) / pi
  std::vector<double> zeta;       // zeta_i = prod_{j=i}^{d-1} (pi - theta_j)/pi, i = 0..d
  std::optional<std::vector<double>> breve;  // theta recursion seeded at pi
};

struct DimsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Entries of W_i are i.i.d. N(0, 1/n_i). Deterministic given the seed.
GeneratorNet sample_gaussian_net(const NetworkDims& dims, std::uint64_t seed);

Eigen::VectorXd forward(const GeneratorNet& net, const Eigen::VectorXd& x);

// W_{i,+,x}: rows of W_i zeroed where the layer-i pre-activation at x is <= 0.
// Ties at exactly zero drop the row (strict diag(v > 0) convention).
// `layer` is 1-based.
Eigen::MatrixXd active_weights(const GeneratorNet& net, const Eigen::VectorXd& x, int layer);

// Lambda_x = W_{d,+,x} ... W_{1,+,x}, built by masked sequential multiplication.
// At x = 0 every pre-activation ties at zero, so the all-zero-mask product
// (the zero matrix) is returned.
Eigen::MatrixXd end_to_end_jacobian(const GeneratorNet& net, const Eigen::VectorXd& x);

// Per-layer activation masks at x; mask[i][r] is true when row r of layer i+1
// is active. Shared by the jacobian-transpose applications in landscape code.
std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>> activation_masks(const GeneratorNet& net,
                                                                    const Eigen::VectorXd& x);

// g(theta) = arccos(((pi - theta) cos theta + sin theta) / pi) on [0, pi].
double g_theta(double theta);

// Angle between two nonzero vectors, in [0, pi]. Robust near 0 and pi.
double angle_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

AngleProfile angle_profile(const Eigen::VectorXd& x, const Eigen::VectorXd& x_star, int d,
                           bool with_breve = false);

// rho_d and Gamma_d from the breve recursion seeded at pi. Memoized per d.
std::pair<double, double> rho_d(int d);

}  // namespace dpr
