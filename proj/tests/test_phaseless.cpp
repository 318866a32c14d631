#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "dpr/phaseless.hpp"
#include "dpr/rng.hpp"
#include "dpr/serialize.hpp"

using namespace dpr;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Footnote construction: rotate x_hat to e1 and y_hat into the e1-e2 plane,
// conjugate the 2x2 reflection block back. Only valid as stated for n = 2, 3.
Eigen::MatrixXd swap_via_rotation(const Eigen::VectorXd& xh, const Eigen::VectorXd& yh) {
  const int n = static_cast<int>(xh.size());
  const double theta = angle_between(xh, yh);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  r.row(0) = xh.transpose();
  Eigen::VectorXd perp = yh - yh.dot(xh) * xh;
  r.row(1) = (perp / perp.norm()).transpose();
  if (n == 3) {
    Eigen::Vector3d a = xh, b = perp.normalized();
    r.row(2) = a.cross(b).transpose();
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  d(0, 0) = std::cos(theta);
  d(0, 1) = std::sin(theta);
  d(1, 0) = std::sin(theta);
  d(1, 1) = -std::cos(theta);
  return r.transpose() * d * r;
}
}  // namespace

TEST_CASE("measurement sampling: determinism and variance") {
  MeasurementEnsemble a = sample_measurements(6, 4, 99);
  MeasurementEnsemble b = sample_measurements(6, 4, 99);
  CHECK((a.a.array() == b.a.array()).all());
  CHECK_THROWS_AS(sample_measurements(0, 4, 1), DimsError);

  // m=1, n=1: a single N(0,1) entry.
  double sum_sq = 0.0;
  const int draws = 4000;
  for (int s = 0; s < draws; ++s) sum_sq += std::pow(sample_measurements(1, 1, s).a(0, 0), 2);
  CHECK(sum_sq / draws == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("E||Az||^2 is approximately ||z||^2") {
  Rng rng = make_rng(12);
  Eigen::VectorXd z = random_unit_vector(50, rng);
  double mean = 0.0;
  const int draws = 100;
  for (int s = 0; s < draws; ++s) mean += (sample_measurements(1000, 50, 500 + s).a * z).squaredNorm() / draws;
  CHECK(std::abs(mean - 1.0) < 0.1);
}

TEST_CASE("observe: definition and phaselessness") {
  MeasurementEnsemble ens = sample_measurements(8, 5, 3);
  Eigen::VectorXd zero5 = Eigen::VectorXd::Zero(5);
  Eigen::VectorXd zero8 = Eigen::VectorXd::Zero(8);
  CHECK(observe(ens.a, zero5, zero8).b.norm() == 0.0);

  Rng rng = make_rng(4);
  Eigen::VectorXd y = gaussian_vector(5, 1.0, rng);
  PhaselessObservation pos = observe(ens.a, y, zero8);
  PhaselessObservation neg = observe(ens.a, -y, zero8);
  CHECK((pos.b.array() >= 0.0).all());
  CHECK((pos.b.array() == neg.b.array()).all());
  CHECK_THROWS_AS(observe(ens.a, y, Eigen::VectorXd::Zero(7)), DimsError);
}

TEST_CASE("sign_matrix_apply: A_z z = |Az| and scale invariance") {
  MeasurementEnsemble ens = sample_measurements(12, 7, 5);
  Rng rng = make_rng(6);
  Eigen::VectorXd z = gaussian_vector(7, 1.0, rng);
  Eigen::VectorXd azz = sign_matrix_apply(ens.a, z, z);
  CHECK((azz - (ens.a * z).cwiseAbs()).norm() <= 1e-14 * azz.norm());

  // Positive Az reduces to a plain multiply.
  Eigen::MatrixXd a_pos = ens.a.cwiseAbs();
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(7);
  Eigen::VectorXd v = gaussian_vector(7, 1.0, rng);
  CHECK((sign_matrix_apply(a_pos, ones, v) - a_pos * v).norm() <= 1e-14 * v.norm());

  // Positively homogeneous in the anchor.
  Eigen::VectorXd w = gaussian_vector(7, 1.0, rng);
  CHECK((sign_matrix_apply(ens.a, 3.7 * z, w) - sign_matrix_apply(ens.a, z, w)).norm() == 0.0);
}

TEST_CASE("sign matrix transpose-apply agrees with the dense oracle") {
  Rng rng = make_rng(7);
  for (int t = 0; t < 20; ++t) {
    MeasurementEnsemble ens = sample_measurements(15, 9, 70 + t);
    Eigen::VectorXd z = gaussian_vector(9, 1.0, rng);
    Eigen::VectorXd v = gaussian_vector(9, 1.0, rng);
    Eigen::MatrixXd dense_az = sign_vector(ens.a * z).asDiagonal() * ens.a;
    Eigen::VectorXd expected = dense_az.transpose() * (dense_az * v);
    Eigen::VectorXd got = ens.a.transpose() *
                          sign_vector(ens.a * z).cwiseProduct(sign_matrix_apply(ens.a, z, v));
    CHECK((expected - got).norm() <= 1e-10 * (1.0 + expected.norm()));
  }
}

TEST_CASE("swap reflector: defining properties") {
  Rng rng = make_rng(8);
  for (int t = 0; t < 10000; ++t) {
    Eigen::VectorXd x = random_unit_vector(6, rng);
    Eigen::VectorXd y = random_unit_vector(6, rng);
    SwapReflector m = swap_matrix(x, y);
    CHECK((m.apply(x) - y).norm() <= 1e-12);
    CHECK((m.apply(y) - x).norm() <= 1e-12);
  }

  // Orthogonal complement of span{x, y} maps to zero; M^2 is the identity on
  // the plane (a reflection).
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd x = random_unit_vector(6, rng);
    Eigen::VectorXd y = random_unit_vector(6, rng);
    SwapReflector m = swap_matrix(x, y);
    Eigen::VectorXd h = gaussian_vector(6, 1.0, rng);
    h -= h.dot(x) * x;
    Eigen::VectorXd yp = y - y.dot(x) * x;
    h -= h.dot(yp) / yp.squaredNorm() * yp;
    CHECK(m.apply(h).norm() <= 1e-10 * h.norm());
    CHECK((m.apply(m.apply(x)) - x).norm() <= 1e-12);
    CHECK((m.apply(m.apply(y)) - y).norm() <= 1e-12);
  }

  Eigen::VectorXd e0 = Eigen::VectorXd::Unit(4, 0);
  SwapReflector self = swap_matrix(e0, e0);
  CHECK((self.dense() - e0 * e0.transpose()).norm() == 0.0);
  SwapReflector anti = swap_matrix(e0, (-e0).eval());
  CHECK((anti.dense() + e0 * e0.transpose()).norm() == 0.0);
  CHECK_THROWS_AS(swap_matrix(2.0 * e0, e0), DomainError);
}

TEST_CASE("swap reflector equals the rotation-footnote construction in n=2,3") {
  Rng rng = make_rng(9);
  for (int n : {2, 3}) {
    for (int t = 0; t < 200; ++t) {
      Eigen::VectorXd x = random_unit_vector(n, rng);
      Eigen::VectorXd y = random_unit_vector(n, rng);
      if (std::sin(angle_between(x, y)) < 1e-6) continue;
      Eigen::MatrixXd oracle = swap_via_rotation(x, y);
      CHECK((swap_matrix(x, y).dense() - oracle).norm() <= 1e-9);
    }
  }
}

TEST_CASE("phi operator: endpoint identities and symmetry") {
  Rng rng = make_rng(10);
  Eigen::VectorXd z = 2.5 * random_unit_vector(8, rng);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(8, 8);
  CHECK((phi_matrix(z, z) - id).norm() <= 1e-12);
  CHECK((phi_matrix(z, (-z).eval()) + id).norm() <= 1e-12);
  CHECK(phi_matrix(Eigen::VectorXd::Zero(8), z).norm() == 0.0);

  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd a = gaussian_vector(8, 1.0, rng);
    Eigen::VectorXd b = gaussian_vector(8, 1.0, rng);
    Eigen::MatrixXd phi = phi_matrix(a, b);
    CHECK((phi - phi.transpose()).norm() <= 1e-12);
    // Rank-2 application matches the dense form.
    Eigen::VectorXd v = gaussian_vector(8, 1.0, rng);
    CHECK((phi_operator(a, b).apply(v) - phi * v).norm() <= 1e-12 * (1.0 + v.norm()));
  }
}

TEST_CASE("phi against the planar brute-force construction in n=2") {
  Rng rng = make_rng(11);
  for (int t = 0; t < 500; ++t) {
    Eigen::VectorXd z = random_unit_vector(2, rng);
    Eigen::VectorXd w = random_unit_vector(2, rng);
    const double theta = angle_between(z, w);
    if (std::sin(theta) < 1e-6) continue;
    Eigen::MatrixXd expected = (kPi - 2.0 * theta) / kPi * Eigen::MatrixXd::Identity(2, 2) +
                               2.0 * std::sin(theta) / kPi * swap_via_rotation(z, w);
    CHECK((phi_matrix(z, w) - expected).norm() <= 1e-9);
  }
}

TEST_CASE("q matrix endpoints and spectral bound") {
  Rng rng = make_rng(12);
  Eigen::VectorXd x = 1.3 * random_unit_vector(5, rng);
  CHECK((q_matrix(x, x) - 0.5 * Eigen::MatrixXd::Identity(5, 5)).norm() <= 1e-12);
  CHECK(q_matrix(x, (-x).eval()).norm() <= 1e-12);
  CHECK_THROWS_AS(q_matrix(Eigen::VectorXd::Zero(5), x), DomainError);

  const double bound = 0.5 + 0.5 / kPi;
  for (int t = 0; t < 300; ++t) {
    Eigen::VectorXd a = gaussian_vector(5, 1.0, rng);
    Eigen::VectorXd b = gaussian_vector(5, 1.0, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q_matrix(a, b));
    CHECK(es.eigenvalues().cwiseAbs().maxCoeff() <= bound + 1e-12);
  }
}

TEST_CASE("varphi: endpoints and the 2/pi cosine floor") {
  CHECK(varphi(0.0) == 0.0);
  CHECK(varphi(kPi) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK_THROWS_AS(varphi(-1e-3), DomainError);
  for (int i = 0; i <= 1000; ++i) {
    const double theta = kPi * i / 1000.0;
    CHECK(std::cos(varphi(theta)) >= 2.0 / kPi - 1e-12);
  }
}

TEST_CASE("relative angle bound on random unit triples") {
  Rng rng = make_rng(13);
  for (int t = 0; t < 2000; ++t) {
    Eigen::VectorXd x1 = random_unit_vector(6, rng);
    Eigen::VectorXd x2 = random_unit_vector(6, rng);
    Eigen::VectorXd y = random_unit_vector(6, rng);
    CHECK(std::abs(angle_between(x1, y) - angle_between(x2, y)) <=
          angle_between(x1, x2) + 1e-10);
  }
}

TEST_CASE("phi continuity: (88/pi) Lipschitz sample") {
  Rng rng = make_rng(14);
  const double lip = 88.0 / kPi;
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double eps = 0.05;
    Eigen::VectorXd z = random_unit_vector(6, rng);
    Eigen::VectorXd w = random_unit_vector(6, rng);
    auto perturb = [&](const Eigen::VectorXd& v) {
      // Rotate by a controlled angle so the chord stays within eps.
      Eigen::VectorXd u = gaussian_vector(6, 1.0, rng);
      u -= u.dot(v) * v;
      u.normalize();
      const double phi = 2.0 * std::asin(0.5 * eps * frac(rng));
      return (std::cos(phi) * v + std::sin(phi) * u).eval();
    };
    Eigen::VectorXd zt = perturb(z);
    Eigen::VectorXd wt = perturb(w);
    const double dist = (phi_matrix(zt, wt) - phi_matrix(z, w)).jacobiSvd().singularValues()[0];
    CHECK(dist <= lip * eps);
  }
}

TEST_CASE("ensemble serialization and observation export") {
  MeasurementEnsemble ens = sample_measurements(6, 4, 321);
  auto path = std::filesystem::temp_directory_path() / "dpr_ens_test.bin";
  save_ensemble(ens, path.string());
  MeasurementEnsemble loaded = load_ensemble(path.string());
  CHECK((loaded.a.array() == ens.a.array()).all());
  std::filesystem::remove(path);

  PhaselessObservation obs = observe(ens.a, Eigen::VectorXd::Ones(4), Eigen::VectorXd::Zero(6));
  const std::string csv = observation_to_csv(obs);
  CHECK(csv.rfind("b_i\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}
