#pragma once

#include <cstdint>
#include <random>

#include "isac/linalg.hpp"
#include "isac/tensor.hpp"

namespace isac {

/// Seeded random stream. Distributions are implemented here rather than
/// taken from <random> so that draws are identical across standard
/// libraries; only the 64-bit Mersenne engine is used from the stdlib.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream keyed by (seed, stream id) through a splitmix64 mix.
  static Rng substream(std::uint64_t seed, std::uint64_t stream);

  double uniform();  // [0, 1)
  double normal();   // N(0, 1)
  cd complex_normal(double variance = 1.0);  // CN(0, variance)

  CMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, double variance = 1.0);
  Tensor3 complex_normal_cube(const Tensor3::Dims& dims, double variance = 1.0);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace isac
