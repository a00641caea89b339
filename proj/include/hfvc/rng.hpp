// Small deterministic RNG used by the benchmark generator and tests.
//
// Streams are keyed by (seed, a, b) so any worker can regenerate problem k
// of cell c bit-identically regardless of scheduling. Distributions are
// implemented here instead of <random> because libstdc++'s distribution
// outputs are not pinned by the standard and the benchmark CSVs must be
// reproducible byte for byte.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

namespace hfvc {

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0) {
    state_ = mix(mix(mix(0x9e3779b97f4a7c15ull ^ seed) ^ a) ^ b);
    if (state_ == 0) state_ = 0x853c49e6748fea9bull;
  }

  std::uint64_t next_u64() {
    // splitmix64 step
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  Eigen::VectorXd normal_vec(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Eigen::MatrixXd normal_mat(int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = normal();
    return m;
  }

  /// Uniform direction on the unit sphere in `dim` dimensions (dim 2 or 3).
  Eigen::VectorXd unit_vector(int dim) {
    while (true) {
      Eigen::VectorXd v = normal_vec(dim);
      const double n = v.norm();
      if (n > 1e-6) return v / n;
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace hfvc
