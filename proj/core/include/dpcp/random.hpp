#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Dense>

namespace dpcp {

using Seed = std::uint64_t;

/// Mixes a master seed with a list of integer keys (splitmix64 chain).
/// Used to derive independent, individually reproducible streams.
Seed derive_seed(Seed master, std::initializer_list<std::uint64_t> keys);

/// Portable random source. The uniform and Gaussian transforms are spelled out
/// here rather than taken from <random> distributions, whose output is
/// implementation-defined, so a seed reproduces the same bits everywhere.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller, pairs cached).
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  Eigen::VectorXd normal_vector(Eigen::Index n);
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);
  /// Uniform on the unit sphere S^{n-1} via a normalized Gaussian.
  Eigen::VectorXd unit_vector(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace dpcp
