#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "isac/linalg.hpp"

namespace isac {

/// Three-way complex tensor (antennas x slots x subcarriers for radar cubes).
///
/// Storage is column-major: entry (i, j, k) lives at i + d1 * (j + d2 * k),
/// so the raw buffer equals vec(T). Mode-n unfoldings keep the remaining
/// indices in increasing order with the earlier one varying fastest:
///   unfold 1: row i, column j + d2 * k
///   unfold 2: row j, column i + d1 * k
///   unfold 3: row k, column i + d1 * j
class Tensor3 {
 public:
  using Dims = std::array<Eigen::Index, 3>;

  Tensor3() = default;
  explicit Tensor3(Dims dims);
  Tensor3(Eigen::Index d1, Eigen::Index d2, Eigen::Index d3) : Tensor3(Dims{d1, d2, d3}) {}

  [[nodiscard]] const Dims& dims() const { return dims_; }
  [[nodiscard]] Eigen::Index dim(int axis) const { return dims_.at(static_cast<std::size_t>(axis - 1)); }
  [[nodiscard]] Eigen::Index size() const { return static_cast<Eigen::Index>(data_.size()); }

  cd& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) { return data_[index(i, j, k)]; }
  const cd& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) const { return data_[index(i, j, k)]; }

  [[nodiscard]] cd* data() { return data_.data(); }
  [[nodiscard]] const cd* data() const { return data_.data(); }

  /// Fibre along axis 1 at (., j, k), e.g. the array snapshot y_{j,k}.
  [[nodiscard]] Eigen::Map<CVector> fibre(Eigen::Index j, Eigen::Index k) {
    return {data_.data() + dims_[0] * (j + dims_[1] * k), dims_[0]};
  }
  [[nodiscard]] Eigen::Map<const CVector> fibre(Eigen::Index j, Eigen::Index k) const {
    return {data_.data() + dims_[0] * (j + dims_[1] * k), dims_[0]};
  }

  /// Frontal slice (d1 x d2) at fixed k.
  [[nodiscard]] Eigen::Map<CMatrix> slice(Eigen::Index k) {
    return {data_.data() + dims_[0] * dims_[1] * k, dims_[0], dims_[1]};
  }
  [[nodiscard]] Eigen::Map<const CMatrix> slice(Eigen::Index k) const {
    return {data_.data() + dims_[0] * dims_[1] * k, dims_[0], dims_[1]};
  }

  Tensor3& operator+=(const Tensor3& other);
  Tensor3& operator*=(cd scale);
  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator*(Tensor3 a, cd s) { return a *= s; }
  bool operator==(const Tensor3& other) const = default;

  [[nodiscard]] double squared_norm() const;

 private:
  [[nodiscard]] std::size_t index(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
    return static_cast<std::size_t>(i + dims_[0] * (j + dims_[1] * k));
  }

  Dims dims_{0, 0, 0};
  std::vector<cd> data_;
};

CMatrix unfold(const Tensor3& t, int axis);
Tensor3 fold(const CMatrix& m, int axis, const Tensor3::Dims& dims);

/// Mode-n product: fold_n(op * unfold_n(t)). op must be (new_dim x dim(axis)).
Tensor3 mode_product(const Tensor3& t, const CMatrix& op, int axis);

/// unfold_n(t) unfold_n(t)^H without materialising the unfolding.
CMatrix unfolding_gram(const Tensor3& t, int axis);

}  // namespace isac
