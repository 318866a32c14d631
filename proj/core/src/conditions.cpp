#include "dpr/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

#include "dpr/rng.hpp"

namespace dpr {

namespace {
constexpr double kPi = 3.14159265358979323846;

double quantile_nearest_rank(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const auto n = static_cast<std::ptrdiff_t>(sorted.size());
  auto rank = static_cast<std::ptrdiff_t>(std::ceil(q * double(n)));
  rank = std::clamp<std::ptrdiff_t>(rank, 1, n);
  return sorted[rank - 1];
}

Eigen::MatrixXd masked_rows(const Eigen::MatrixXd& w, const Eigen::VectorXd& keep_if_pos) {
  Eigen::MatrixXd out = w;
  for (int r = 0; r < out.rows(); ++r)
    if (!(keep_if_pos[r] > 0.0)) out.row(r).setZero();
  return out;
}

// Rotate x by `angle` radians inside a random plane containing x.
Eigen::VectorXd rotate_slightly(const Eigen::VectorXd& x, double angle, Rng& rng) {
  Eigen::VectorXd g = gaussian_vector(static_cast<int>(x.size()), 1.0, rng);
  Eigen::VectorXd perp = g - g.dot(x) / x.squaredNorm() * x;
  if (perp.norm() < 1e-12) return x;
  perp.normalize();
  return std::cos(angle) * x + std::sin(angle) * x.norm() * perp;
}

}  // namespace

nlohmann::json report_to_json(const DeviationReport& report) {
  return nlohmann::json{{"samples", report.samples}, {"max_dev", report.max_dev},
                        {"mean_dev", report.mean_dev}, {"p50", report.p50},
                        {"p95", report.p95},           {"config", report.config}};
}

DeviationReport make_report(std::vector<double> deviations, nlohmann::json config) {
  DeviationReport report;
  report.samples = static_cast<int>(deviations.size());
  report.config = std::move(config);
  if (deviations.empty()) return report;
  report.mean_dev =
      std::accumulate(deviations.begin(), deviations.end(), 0.0) / double(deviations.size());
  std::sort(deviations.begin(), deviations.end());
  report.max_dev = deviations.back();
  report.p50 = quantile_nearest_rank(deviations, 0.50);
  report.p95 = quantile_nearest_rank(deviations, 0.95);
  return report;
}

double spectral_norm(const Eigen::MatrixXd& m) {
  if (std::min(m.rows(), m.cols()) <= 256) {
    return m.jacobiSvd().singularValues()[0];
  }
  // Power iteration on m^T m.
  Rng rng = make_rng(0x9E3779B9ULL);
  Eigen::VectorXd v = random_unit_vector(static_cast<int>(m.cols()), rng);
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd next = m.transpose() * (m * v);
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    next /= norm;
    if (std::abs(norm - lambda) < 1e-9 * std::max(1.0, norm)) {
      lambda = norm;
      break;
    }
    lambda = norm;
    v = std::move(next);
  }
  return std::sqrt(lambda);
}

DeviationReport wdc_deviation(const Eigen::MatrixXd& w, int num_pairs, std::uint64_t seed,
                              const Eigen::MatrixXd* latent_rotation) {
  const int k = static_cast<int>(w.cols());
  if (w.rows() < k) throw DimsError("wdc_deviation expects n >= k");
  Rng rng = make_rng(split_seed(seed, 1));

  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
  pairs.reserve(num_pairs + k * k + 16);
  for (int i = 0; i < num_pairs; ++i)
    pairs.emplace_back(random_unit_vector(k, rng), random_unit_vector(k, rng));
  // Structured adversaries: coordinate axes, antipodal, nearly parallel.
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      pairs.emplace_back(Eigen::VectorXd::Unit(k, i), Eigen::VectorXd::Unit(k, j));
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd x = random_unit_vector(k, rng);
    pairs.emplace_back(x, -x);
  }
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd x = random_unit_vector(k, rng);
    pairs.emplace_back(x, rotate_slightly(x, 1e-3, rng));
  }

  std::vector<double> devs;
  devs.reserve(pairs.size());
  for (auto& [x, y] : pairs) {
    if (latent_rotation) {
      x = (*latent_rotation) * x;
      y = (*latent_rotation) * y;
    }
    Eigen::MatrixXd wx = masked_rows(w, w * x);
    Eigen::MatrixXd wy = masked_rows(w, w * y);
    devs.push_back(spectral_norm(wx.transpose() * wy - q_matrix(x, y)));
  }
  return make_report(std::move(devs),
                     {{"op", "wdc_deviation"}, {"n", w.rows()}, {"k", k},
                      {"num_pairs", num_pairs}, {"seed", seed}});
}

DeviationReport rrcp_deviation(const MeasurementEnsemble& ensemble, const GeneratorNet& net,
                               int num_tuples, std::uint64_t seed) {
  if (ensemble.n() != net.output_dim())
    throw DimsError("ensemble signal dimension must match network output");
  const int k = net.latent_dim();
  Rng rng = make_rng(split_seed(seed, 2));

  std::vector<double> devs;
  devs.reserve(num_tuples);
  for (int t = 0; t < num_tuples; ++t) {
    Eigen::VectorXd gx, gy, u, v;
    Eigen::VectorXd x, y;
    int attempts = 0;
    do {
      if (++attempts > 64) throw DomainError("rrcp tuple sampling degenerated");
      x = gaussian_vector(k, 1.0, rng);
      y = gaussian_vector(k, 1.0, rng);
      Eigen::VectorXd x1 = gaussian_vector(k, 1.0, rng);
      Eigen::VectorXd x2 = gaussian_vector(k, 1.0, rng);
      Eigen::VectorXd x3 = gaussian_vector(k, 1.0, rng);
      Eigen::VectorXd x4 = gaussian_vector(k, 1.0, rng);
      // Structured cases, cycled deterministically: diagonal z = w, secant
      // through antipodes, repeated difference pairs.
      if (t % 4 == 1) y = x;
      if (t % 4 == 2) x2 = -x1;
      if (t % 4 == 3) { x3 = x1; x4 = x2; }
      gx = forward(net, x);
      gy = forward(net, y);
      u = forward(net, x1) - forward(net, x2);
      v = forward(net, x3) - forward(net, x4);
    } while (gx.norm() == 0.0 || gy.norm() == 0.0 || u.norm() < 1e-12 || v.norm() < 1e-12);

    Eigen::VectorXd sx = sign_vector(ensemble.a * gx);
    Eigen::VectorXd sy = sign_vector(ensemble.a * gy);
    Eigen::VectorXd au = ensemble.a * u;
    Eigen::VectorXd av = ensemble.a * v;
    double quad = 0.0;
    for (int i = 0; i < au.size(); ++i) quad += sx[i] * sy[i] * au[i] * av[i];
    const double phi_part = phi_operator(gx, gy).apply(u).dot(v);
    devs.push_back(std::abs(quad - phi_part) / (u.norm() * v.norm() * kRrcpL));
  }
  return make_report(std::move(devs),
                     {{"op", "rrcp_deviation"}, {"m", ensemble.m()}, {"n", ensemble.n()},
                      {"k", k}, {"num_tuples", num_tuples}, {"seed", seed}});
}

DeviationReport angle_distortion_check(const MeasurementEnsemble& ensemble,
                                       const GeneratorNet& net, int num_pairs,
                                       std::uint64_t seed) {
  const int k = net.latent_dim();
  Rng rng = make_rng(split_seed(seed, 3));
  std::vector<double> devs;
  devs.reserve(num_pairs);
  for (int t = 0; t < num_pairs; ++t) {
    Eigen::VectorXd gx, gy;
    int attempts = 0;
    do {
      if (++attempts > 64) throw DomainError("angle distortion sampling degenerated");
      gx = forward(net, gaussian_vector(k, 1.0, rng));
      gy = forward(net, gaussian_vector(k, 1.0, rng));
    } while (gx.norm() == 0.0 || gy.norm() == 0.0);
    Eigen::VectorXd azx = (ensemble.a * gx).cwiseAbs();
    Eigen::VectorXd azy = (ensemble.a * gy).cwiseAbs();
    if (azx.norm() == 0.0 || azy.norm() == 0.0) { --t; continue; }
    const double theta1 = angle_between(azx, azy);
    const double theta_d = angle_between(gx, gy);
    devs.push_back(std::abs(std::cos(theta1) - std::cos(varphi(theta_d))));
  }
  return make_report(std::move(devs),
                     {{"op", "angle_distortion"}, {"m", ensemble.m()}, {"k", k},
                      {"num_pairs", num_pairs}, {"seed", seed}});
}

std::int64_t sphere_covering_bound(std::int64_t m, int ell) {
  // 2 sum_{i=0}^{ell-1} C(m-1, i)
  std::int64_t total = 0;
  for (int i = 0; i < ell; ++i) {
    std::int64_t c = 1;
    for (int j = 0; j < i; ++j) c = c * (m - 1 - j) / (j + 1);
    total += c;
  }
  return 2 * total;
}

std::set<std::vector<int>> tessellation_patterns_2d(const Eigen::MatrixXd& a_sub) {
  const int m = static_cast<int>(a_sub.rows());
  Eigen::MatrixXd rows = a_sub;
  // Perturb repeated hyperplane directions so the sweep sees distinct lines.
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < i; ++j) {
      Eigen::Vector2d ri = rows.row(i), rj = rows.row(j);
      if (std::abs(ri.x() * rj.y() - ri.y() * rj.x()) < 1e-14 * ri.norm() * rj.norm())
        rows(i, 0) += 1e-9 * (1.0 + rows.row(i).norm());
    }
  }

  // Each row's zero set {v : <a_i, v> = 0} cuts the circle at two antipodal
  // angles; between consecutive cuts the sign pattern is constant.
  std::vector<double> cuts;
  cuts.reserve(2 * m);
  for (int i = 0; i < m; ++i) {
    const double phi = std::atan2(rows(i, 1), rows(i, 0)) + kPi / 2.0;
    double c = std::fmod(phi, 2.0 * kPi);
    if (c < 0) c += 2.0 * kPi;
    cuts.push_back(c);
    cuts.push_back(std::fmod(c + kPi, 2.0 * kPi));
  }
  std::sort(cuts.begin(), cuts.end());

  std::set<std::vector<int>> patterns;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double next = (i + 1 < cuts.size()) ? cuts[i + 1] : cuts.front() + 2.0 * kPi;
    const double mid = 0.5 * (cuts[i] + next);
    Eigen::Vector2d v(std::cos(mid), std::sin(mid));
    std::vector<int> pattern(m);
    bool full = true;
    for (int r = 0; r < m; ++r) {
      const double s = rows.row(r).dot(v);
      if (s == 0.0) { full = false; break; }
      pattern[r] = s > 0 ? 1 : -1;
    }
    if (full) patterns.insert(std::move(pattern));
  }
  return patterns;
}

TessellationResult tessellation_count(const Eigen::MatrixXd& a_sub, int ell, int num_probes,
                                      std::uint64_t seed) {
  if (a_sub.cols() != ell) throw DimsError("a_sub must have ell columns");
  const auto m = static_cast<std::int64_t>(a_sub.rows());
  TessellationResult result;
  result.sphere_covering = sphere_covering_bound(m, ell);
  result.bound_10m2k = 10.0 * std::pow(double(m), 2.0 * ell);

  if (ell == 1) {
    std::set<std::vector<int>> patterns;
    for (double s : {1.0, -1.0}) {
      std::vector<int> pattern(m);
      bool full = true;
      for (int r = 0; r < m; ++r) {
        const double val = s * a_sub(r, 0);
        if (val == 0.0) { full = false; break; }
        pattern[r] = val > 0 ? 1 : -1;
      }
      if (full) patterns.insert(std::move(pattern));
    }
    result.count = static_cast<std::int64_t>(patterns.size());
    result.exact = true;
    return result;
  }
  if (ell == 2) {
    result.count = static_cast<std::int64_t>(tessellation_patterns_2d(a_sub).size());
    result.exact = true;
    return result;
  }

  Rng rng = make_rng(split_seed(seed, 4));
  std::set<std::vector<int>> patterns;
  for (int p = 0; p < num_probes; ++p) {
    Eigen::VectorXd v = random_unit_vector(ell, rng);
    Eigen::VectorXd s = a_sub * v;
    std::vector<int> pattern(m);
    bool full = true;
    for (int r = 0; r < m; ++r) {
      if (s[r] == 0.0) { full = false; break; }
      pattern[r] = s[r] > 0 ? 1 : -1;
    }
    if (full) patterns.insert(std::move(pattern));
  }
  result.count = static_cast<std::int64_t>(patterns.size());
  result.exact = false;
  return result;
}

double restricted_norm(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                       const Eigen::MatrixXd& basis) {
  Eigen::MatrixXd sub(rows.size(), basis.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) sub.row(i) = a.row(rows[i]) * basis;
  return spectral_norm(sub);
}

DeviationReport submatrix_spectral_check(const Eigen::MatrixXd& a, int subspace_dim,
                                         int max_rows, int trials, std::uint64_t seed) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (max_rows > m) throw DimsError("max_rows exceeds the number of measurement rows");
  Rng rng = make_rng(split_seed(seed, 5));
  Eigen::MatrixXd basis =
      Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian_matrix(n, subspace_dim, 1.0, rng))
          .householderQ() *
      Eigen::MatrixXd::Identity(n, subspace_dim);

  std::vector<int> all_rows(m);
  std::iota(all_rows.begin(), all_rows.end(), 0);
  std::vector<double> devs;
  devs.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    std::uniform_int_distribution<int> size_dist(1, max_rows);
    const int size = size_dist(rng);
    std::shuffle(all_rows.begin(), all_rows.end(), rng);
    std::vector<int> omega(all_rows.begin(), all_rows.begin() + size);
    const double predicted =
        std::sqrt(double(size) / double(m)) + std::sqrt(double(subspace_dim) / double(m));
    devs.push_back(restricted_norm(a, omega, basis) / predicted);
  }
  return make_report(std::move(devs),
                     {{"op", "submatrix_spectral"}, {"m", m}, {"n", n},
                      {"subspace_dim", subspace_dim}, {"max_rows", max_rows},
                      {"trials", trials}, {"seed", seed}});
}

DeviationReport subgradient_vs_h(const ProblemInstance& inst, int num_points,
                                 std::uint64_t seed) {
  const int k = inst.latent_dim();
  const int d = inst.depth();
  const double rs = inst.x_star.norm();
  const double pow2d = std::ldexp(1.0, d);
  Rng rng = make_rng(split_seed(seed, 6));
  const double radii[] = {0.5, 1.0, 2.0};

  std::vector<double> devs;
  devs.reserve(num_points);
  for (int t = 0; t < num_points; ++t) {
    const double radius = radii[t % 3] * rs;
    Eigen::VectorXd x = radius * random_unit_vector(k, rng);
    Eigen::VectorXd v = subgradient(inst, x).v;
    Eigen::VectorXd h = h_direction(x, inst.x_star, d);
    devs.push_back(pow2d * (v - h).norm() / std::max(x.norm(), rs));
  }
  return make_report(std::move(devs),
                     {{"op", "subgradient_vs_h"}, {"k", k}, {"d", d},
                      {"num_points", num_points}, {"seed", seed}});
}

}  // namespace dpr
