#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace dpr {

using Rng = std::mt19937_64;

// Splittable counter scheme: a master seed plus a stream index map to an
// independent child seed through SplitMix64. Stream assignment is therefore
// reproducible from (master, index) alone, independent of how many streams a
// run ends up using. Any language can reproduce the assignment:
//   z = master + (index + 1) * 0x9E3779B97F4A7C15
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   child = z ^ (z >> 31)
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline Eigen::VectorXd gaussian_vector(int n, double stddev, Rng& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

inline Eigen::MatrixXd gaussian_matrix(int rows, int cols, double stddev, Rng& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  Eigen::MatrixXd m(rows, cols);
  // Row-major fill order so the stream layout matches the serialized format.
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

inline Eigen::VectorXd random_unit_vector(int n, Rng& rng) {
  Eigen::VectorXd v;
  do {
    v = gaussian_vector(n, 1.0, rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

}  // namespace dpr
