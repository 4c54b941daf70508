#include "isac/random.hpp"

#include <cmath>

namespace isac {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t stream) { return Rng(mix_seed(seed, stream)); }

double Rng::uniform() {
  // 53 random mantissa bits.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * kPi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

cd Rng::complex_normal(double variance) {
  const double s = std::sqrt(0.5 * variance);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

CMatrix Rng::complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, double variance) {
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_normal(variance);
  }
  return m;
}

Tensor3 Rng::complex_normal_cube(const Tensor3::Dims& dims, double variance) {
  Tensor3 t(dims);
  cd* p = t.data();
  for (Eigen::Index n = 0; n < t.size(); ++n) p[n] = complex_normal(variance);
  return t;
}

}  // namespace isac
