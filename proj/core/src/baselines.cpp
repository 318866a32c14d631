#include "dpr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dpr/parallel.hpp"
#include "dpr/rng.hpp"

namespace dpr {

namespace {

void hard_threshold(Eigen::VectorXd& z, int sparsity) {
  const int n = static_cast<int>(z.size());
  if (sparsity >= n) return;
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::nth_element(idx.begin(), idx.begin() + sparsity, idx.end(),
                   [&](int a, int b) { return std::abs(z[a]) > std::abs(z[b]); });
  for (int i = sparsity; i < n; ++i) z[idx[i]] = 0.0;
}

}  // namespace

Eigen::VectorXd thresholded_amplitude_flow(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                           const SparseSolverConfig& config) {
  const int n = static_cast<int>(a.cols());
  const int m = static_cast<int>(a.rows());
  if (config.sparsity > n) throw DimsError("sparsity exceeds signal dimension");
  if (m == 0 || b.norm() == 0.0) return Eigen::VectorXd::Zero(n);

  // Spectral start: leading eigenvector of sum_i b_i^2 a_i a_i^T, computed by
  // power iteration; the measurement scale ||b|| estimates the signal norm.
  Eigen::VectorXd w = b.cwiseProduct(b);
  Rng rng = make_rng(0xAF10u);
  Eigen::VectorXd z = random_unit_vector(n, rng);
  for (int it = 0; it < config.init_samples; ++it) {
    Eigen::VectorXd next = a.transpose() * w.cwiseProduct(a * z).eval();
    const double norm = next.norm();
    if (norm == 0.0) break;
    z = next / norm;
  }
  z *= b.norm();
  hard_threshold(z, config.sparsity);

  for (int it = 0; it < config.iters; ++it) {
    Eigen::VectorXd az = a * z;
    Eigen::VectorXd signs = sign_vector(az);
    Eigen::VectorXd grad = a.transpose() * (az - b.cwiseProduct(signs)).eval();
    z -= config.step * grad;
    hard_threshold(z, config.sparsity);
  }
  return z;
}

double sign_resolved_error(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y) {
  return std::min((y_hat - y).norm(), (y_hat + y).norm()) / y.norm();
}

Eigen::VectorXd sample_sparse_signal(int n, int sparsity, std::uint64_t seed) {
  Rng rng = make_rng(split_seed(seed, 7));
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < sparsity; ++i) y[idx[i]] = normal(rng);
  if (y.norm() == 0.0) y[idx[0]] = 1.0;
  return y / y.norm();
}

std::vector<CompareRow> sweep_compare(const GenerativeFamily& generative,
                                      const SparseFamily& sparse,
                                      const std::vector<int>& m_grid, int trials,
                                      std::uint64_t seed, double success_threshold,
                                      int workers) {
  if (m_grid.empty() || trials < 1) throw DimsError("sweep_compare needs a nonempty grid");
  const int n = sparse.n;
  const int total = static_cast<int>(m_grid.size()) * trials;
  std::vector<double> gen_errs(total), sp_errs(total);

  parallel_for_indexed(total, workers, [&](int job) {
    const std::size_t mi = job / trials;
    const int t = job % trials;
    const int m = m_grid[mi];
    const std::uint64_t trial_seed = split_seed(seed, mi * 1000 + t);

    // Generative signal + DPR.
    {
      GeneratorNet net = sample_gaussian_net(generative.dims, split_seed(trial_seed, 10));
      Eigen::VectorXd x_star;
      Rng rng = make_rng(split_seed(trial_seed, 11));
      do {
        x_star = gaussian_vector(generative.dims.k, 1.0, rng);
      } while (x_star.norm() < 1e-12);
      double err = 1.0;
      if (m > 0) {
        MeasurementEnsemble ens =
            sample_measurements(m, net.output_dim(), split_seed(trial_seed, 12));
        ProblemInstance inst = make_noiseless_instance(net, ens, x_star);
        SolverConfig solver = generative.solver;
        solver.seed = split_seed(trial_seed, 13);
        IterateTrace trace = run_restarts(inst, solver);
        Eigen::VectorXd y_star = forward(inst.net, x_star);
        err = sign_resolved_error(forward(inst.net, trace.final_x), y_star);
      }
      gen_errs[job] = err;
    }

    // Sparse signal + thresholded amplitude flow.
    {
      Eigen::VectorXd y_star =
          sample_sparse_signal(n, sparse.solver.sparsity, split_seed(trial_seed, 20));
      double err = 1.0;
      if (m > 0) {
        MeasurementEnsemble ens = sample_measurements(m, n, split_seed(trial_seed, 21));
        Eigen::VectorXd b = (ens.a * y_star).cwiseAbs();
        Eigen::VectorXd y_hat = thresholded_amplitude_flow(ens.a, b, sparse.solver);
        err = sign_resolved_error(y_hat, y_star);
      }
      sp_errs[job] = err;
    }
  });

  std::vector<CompareRow> rows;
  for (std::size_t mi = 0; mi < m_grid.size(); ++mi) {
    double gen_err = 0.0, gen_succ = 0.0, sp_err = 0.0, sp_succ = 0.0;
    for (int t = 0; t < trials; ++t) {
      const int job = static_cast<int>(mi) * trials + t;
      gen_err += gen_errs[job];
      sp_err += sp_errs[job];
      if (gen_errs[job] < success_threshold) gen_succ += 1.0;
      if (sp_errs[job] < success_threshold) sp_succ += 1.0;
    }
    rows.push_back({m_grid[mi], "dpr", gen_err / trials, gen_succ / trials, trials});
    rows.push_back({m_grid[mi], "thresholded_af", sp_err / trials, sp_succ / trials, trials});
  }
  return rows;
}

std::string compare_to_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "m,algo,mean_err,success_rate,trials\n";
  for (const auto& r : rows)
    out << r.m << "," << r.algo << "," << r.mean_err << "," << r.success_rate << ","
        << r.trials << "\n";
  return out.str();
}

}  // namespace dpr
