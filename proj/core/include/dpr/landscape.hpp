#pragma once

#include <Eigen/Dense>

#include "dpr/generator.hpp"
#include "dpr/phaseless.hpp"

namespace dpr {

// One recovery task: y_* = G(x_*) observed through the ensemble.
struct ProblemInstance {
  GeneratorNet net;
  MeasurementEnsemble ensemble;
  Eigen::VectorXd x_star;
  PhaselessObservation obs;

  int latent_dim() const { return net.latent_dim(); }
  int depth() const { return net.depth(); }
};

ProblemInstance make_instance(GeneratorNet net, MeasurementEnsemble ensemble,
                              Eigen::VectorXd x_star, const Eigen::VectorXd& eta);
ProblemInstance make_noiseless_instance(GeneratorNet net, MeasurementEnsemble ensemble,
                                        Eigen::VectorXd x_star);

// A single Clarke element; `differentiable` is false when any sgn tie
// (pre-activation or measurement inner product exactly zero) was hit.
struct DescentDirection {
  Eigen::VectorXd v;
  bool differentiable = true;
};

// f(x) = 1/2 || |A G(x)| - b ||^2.
double objective(const ProblemInstance& inst, const Eigen::VectorXd& x);

// Lambda_x^T A_{G(x)}^T (|A G(x)| - b) under the sgn(0) = 0 convention; the
// gradient wherever f is differentiable, a specific Clarke element otherwise.
DescentDirection subgradient(const ProblemInstance& inst, const Eigen::VectorXd& x);

// Per-layer pre-activations of the forward pass; used by boundary-margin
// checks around the finite-difference validation.
std::vector<Eigen::VectorXd> layer_preactivations(const GeneratorNet& net,
                                                  const Eigen::VectorXd& x);

// Analytic direction h_x with the minus sign on the x_star term; its zeros
// sit at x_* and -rho_d x_* and it matches the gradient of the idealized
// loss in the radial direction. The one-layer display elsewhere writes the
// first term with a plus; that form does not vanish at x_*.
Eigen::VectorXd h_direction(const Eigen::VectorXd& x, const Eigen::VectorXd& x_star, int d);

// w_x = Lambda_x^T (Lambda_x x - Phi_{x_d, x_{*,d}} Lambda_{x_*} x_*).
Eigen::VectorXd w_direction(const ProblemInstance& inst, const Eigen::VectorXd& x);

// h~_{x,y} = 2^{-d} [ zeta_0 y + sum_i (sin theta_i / pi) zeta_{i+1} (||y||/||x||) x ].
Eigen::VectorXd h_tilde(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int d);

// Closed-form idealized loss F(x); the zero-measurement-error landscape.
// F(0) is the direction-free continuity limit ||x_*||^2 / 2^{d+1}.
double idealized_loss(const Eigen::VectorXd& x, const Eigen::VectorXd& x_star, int d);

// ||h_x|| <= (beta / 2^d) max(||x||, ||x_*||).
bool s_beta_membership(const Eigen::VectorXd& x, const Eigen::VectorXd& x_star, int d,
                       double beta);

}  // namespace dpr
