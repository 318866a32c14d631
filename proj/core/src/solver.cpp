#include "dpr/solver.hpp"

#include <cmath>
#include <sstream>

#include "dpr/rng.hpp"

namespace dpr {

namespace {

constexpr int kDivergenceWindow = 50;
constexpr double kStepStagnationTol = 1e-9;

Eigen::VectorXd reperturb_if_zero(Eigen::VectorXd x, std::uint64_t seed, int t) {
  if (x.norm() != 0.0) return x;
  Rng rng = make_rng(split_seed(seed, 0x5EED0000ULL + static_cast<std::uint64_t>(t)));
  return x + gaussian_vector(static_cast<int>(x.size()), 1e-6, rng);
}

double tail_log_slope(const std::vector<IterateRecord>& records) {
  // Least-squares slope of log f(x_t) over the last half of the trace.
  const int n = static_cast<int>(records.size());
  if (n < 4) return 0.0;
  const int start = n / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int i = start; i < n; ++i) {
    if (records[i].f <= 0.0) continue;
    const double xi = static_cast<double>(i);
    const double yi = std::log(records[i].f);
    sx += xi;
    sy += yi;
    sxx += xi * xi;
    sxy += xi * yi;
    ++count;
  }
  if (count < 2) return 0.0;
  const double denom = count * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (count * sxy - sx * sy) / denom;
}

struct AdamState {
  Eigen::VectorXd m, s;
  int t = 0;
  double step = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  Eigen::VectorXd update(const Eigen::VectorXd& grad) {
    if (m.size() == 0) {
      m = Eigen::VectorXd::Zero(grad.size());
      s = Eigen::VectorXd::Zero(grad.size());
    }
    ++t;
    m = beta1 * m + (1.0 - beta1) * grad;
    s = beta2 * s + (1.0 - beta2) * grad.cwiseProduct(grad).eval();
    const double bc1 = 1.0 - std::pow(beta1, t);
    const double bc2 = 1.0 - std::pow(beta2, t);
    return step * (m / bc1).cwiseQuotient(((s / bc2).cwiseSqrt().array() + eps).matrix());
  }
};

IterateTrace run_descent(const ProblemInstance& inst, const SolverConfig& config,
                         Eigen::VectorXd x, bool negation) {
  const int d = inst.depth();
  const double alpha = config.step_size > 0.0 ? config.step_size : default_step_size(d);
  const double scale = std::max(inst.x_star.norm(), 1e-30);
  const double pow2d = std::ldexp(1.0, d);

  IterateTrace trace;
  trace.records.reserve(config.max_iters);
  AdamState adam;
  int growth_streak = 0;
  double fx = objective(inst, x);
  const double f0 = fx;

  for (int t = 0; t < config.max_iters; ++t) {
    if (x.norm() == 0.0) {
      x = reperturb_if_zero(std::move(x), config.seed, t);
      fx = objective(inst, x);
    }
    if (!std::isfinite(fx) || !x.allFinite()) {
      trace.status = TerminalStatus::diverged;
      break;
    }
    Eigen::VectorXd xbar = x;
    bool negated = false;
    if (negation) {
      const double fneg = objective(inst, -x);
      if (fneg < fx) {
        xbar = -x;
        negated = true;
      }
    }
    DescentDirection dir = subgradient(inst, xbar);
    const double gnorm = dir.v.norm();
    trace.records.push_back({t, x, fx, negated, gnorm});

    Eigen::VectorXd x_next;
    if (config.variant == SolverVariant::adaptive_moment) {
      x_next = xbar - adam.update(dir.v);
    } else {
      x_next = xbar - alpha * dir.v;
    }

    const double step_norm = (x_next - xbar).norm();
    const bool grad_small = gnorm * pow2d / scale < config.grad_tol;
    if (grad_small || step_norm < kStepStagnationTol) {
      trace.status = grad_small ? TerminalStatus::converged : TerminalStatus::step_stagnated;
      x = std::move(x_next);
      break;
    }

    const double f_next = objective(inst, x_next);
    growth_streak = f_next > fx ? growth_streak + 1 : 0;
    x = std::move(x_next);
    fx = f_next;
    if (growth_streak >= kDivergenceWindow) {
      trace.status = TerminalStatus::diverged;
      break;
    }
  }

  if (!x.allFinite()) trace.status = TerminalStatus::diverged;
  if (trace.status == TerminalStatus::diverged && !trace.records.empty()) {
    x = trace.records.back().x;  // last finite iterate
  }
  trace.final_x = x;
  trace.final_f = objective(inst, x);
  trace.convergence_rate = tail_log_slope(trace.records);

  const double fstar = objective(inst, inst.x_star);
  const double denom = alpha * std::pow(double(d), 6) * scale * scale;
  if (denom > 0.0) {
    trace.iter_bound_from_f_x0 = f0 * pow2d * pow2d / denom;
    trace.iter_bound_from_f_xstar = fstar * pow2d * pow2d / denom;
  }
  return trace;
}

}  // namespace

double default_step_size(int depth) {
  return std::ldexp(1.0, depth) / (10.0 * double(depth) * double(depth));
}

std::string to_string(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::converged: return "converged";
    case TerminalStatus::step_stagnated: return "step_stagnated";
    case TerminalStatus::max_iters: return "max_iters";
    case TerminalStatus::diverged: return "diverged";
  }
  return "unknown";
}

StepResult dpr_step(const ProblemInstance& inst, const Eigen::VectorXd& x_t, double alpha) {
  if (x_t.norm() == 0.0) throw DomainError("zero iterate; restart required");
  StepResult out;
  Eigen::VectorXd xbar = x_t;
  if (objective(inst, -x_t) < objective(inst, x_t)) {
    xbar = -x_t;
    out.negated = true;
  }
  out.x_next = xbar - alpha * subgradient(inst, xbar).v;
  return out;
}

IterateTrace solve(const ProblemInstance& inst, const SolverConfig& config,
                   const Eigen::VectorXd& x0) {
  if (x0.norm() == 0.0) throw DomainError("x0 must be nonzero");
  return run_descent(inst, config, x0, config.negation);
}

IterateTrace solve_two_branch(const ProblemInstance& inst, const SolverConfig& config,
                              const Eigen::VectorXd& x0) {
  if (x0.norm() == 0.0) throw DomainError("x0 must be nonzero");
  IterateTrace pos = run_descent(inst, config, x0, false);
  IterateTrace neg = run_descent(inst, config, -x0, false);
  return pos.final_f <= neg.final_f ? pos : neg;
}

IterateTrace run_restarts(const ProblemInstance& inst, const SolverConfig& config) {
  if (config.restarts < 1) throw DomainError("restarts must be at least 1");
  const bool noiseless = inst.obs.noise_norm() == 0.0;
  const Eigen::VectorXd y_star = forward(inst.net, inst.x_star);

  IterateTrace best;
  double best_metric = 0.0;
  for (int r = 0; r < config.restarts; ++r) {
    Rng rng = make_rng(split_seed(config.seed, static_cast<std::uint64_t>(r)));
    Eigen::VectorXd x0;
    do {
      x0 = gaussian_vector(inst.latent_dim(), 1.0, rng);
    } while (x0.norm() == 0.0);
    IterateTrace trace = solve(inst, config, x0);
    const double metric = noiseless
                              ? reconstruction_error(inst.net, trace.final_x, y_star)
                              : trace.final_f;
    if (r == 0 || metric < best_metric) {
      best_metric = metric;
      best = std::move(trace);
    }
  }
  return best;
}

double reconstruction_error(const GeneratorNet& net, const Eigen::VectorXd& x_hat,
                            const Eigen::VectorXd& y_star) {
  return (forward(net, x_hat) - y_star).norm() / std::sqrt(double(net.output_dim()));
}

double relative_latent_error(const Eigen::VectorXd& x, const Eigen::VectorXd& x_star) {
  const double rs = x_star.norm();
  return std::min((x - x_star).norm(), (x + x_star).norm()) / rs;
}

std::string trace_to_csv(const IterateTrace& trace, const Eigen::VectorXd* x_star) {
  std::ostringstream out;
  out.precision(17);
  out << "t,f,grad_norm,negated";
  if (x_star) out << ",rel_latent_err";
  out << "\n";
  for (const auto& rec : trace.records) {
    out << rec.t << "," << rec.f << "," << rec.grad_norm << "," << (rec.negated ? 1 : 0);
    if (x_star) out << "," << relative_latent_error(rec.x, *x_star);
    out << "\n";
  }
  return out.str();
}

}  // namespace dpr
