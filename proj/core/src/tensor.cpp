#include "isac/tensor.hpp"

#include <stdexcept>
#include <string>

namespace isac {

namespace {

void check_axis(int axis) {
  if (axis < 1 || axis > 3) throw std::invalid_argument("tensor axis must be 1, 2 or 3");
}

}  // namespace

Tensor3::Tensor3(Dims dims) : dims_(dims) {
  for (auto d : dims_) {
    if (d < 0) throw std::invalid_argument("Tensor3: negative dimension");
  }
  data_.assign(static_cast<std::size_t>(dims_[0] * dims_[1] * dims_[2]), cd{0.0, 0.0});
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
  if (dims_ != other.dims_) throw std::invalid_argument("Tensor3: dimension mismatch in +=");
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += other.data_[n];
  return *this;
}

Tensor3& Tensor3::operator*=(cd scale) {
  for (auto& x : data_) x *= scale;
  return *this;
}

double Tensor3::squared_norm() const {
  double acc = 0.0;
  for (const auto& x : data_) acc += std::norm(x);
  return acc;
}

CMatrix unfold(const Tensor3& t, int axis) {
  check_axis(axis);
  const auto [d1, d2, d3] = t.dims();
  switch (axis) {
    case 1:
      return Eigen::Map<const CMatrix>(t.data(), d1, d2 * d3);
    case 2: {
      CMatrix m(d2, d1 * d3);
      for (Eigen::Index k = 0; k < d3; ++k) m.middleCols(d1 * k, d1) = t.slice(k).transpose();
      return m;
    }
    default:
      return Eigen::Map<const CMatrix>(t.data(), d1 * d2, d3).transpose();
  }
}

Tensor3 fold(const CMatrix& m, int axis, const Tensor3::Dims& dims) {
  check_axis(axis);
  const auto [d1, d2, d3] = dims;
  const Eigen::Index rows = dims[static_cast<std::size_t>(axis - 1)];
  if (m.rows() != rows || m.rows() * m.cols() != d1 * d2 * d3) {
    throw std::invalid_argument("fold: matrix shape " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + " does not match tensor dimensions");
  }
  Tensor3 t(dims);
  switch (axis) {
    case 1:
      Eigen::Map<CMatrix>(t.data(), d1, d2 * d3) = m;
      break;
    case 2:
      for (Eigen::Index k = 0; k < d3; ++k) t.slice(k) = m.middleCols(d1 * k, d1).transpose();
      break;
    default:
      Eigen::Map<CMatrix>(t.data(), d1 * d2, d3) = m.transpose();
      break;
  }
  return t;
}

Tensor3 mode_product(const Tensor3& t, const CMatrix& op, int axis) {
  check_axis(axis);
  const auto [d1, d2, d3] = t.dims();
  if (op.cols() != t.dim(axis)) {
    throw std::invalid_argument("mode_product: operator width does not match tensor axis");
  }
  Tensor3::Dims out_dims = t.dims();
  out_dims[static_cast<std::size_t>(axis - 1)] = op.rows();
  Tensor3 out(out_dims);
  switch (axis) {
    case 1:
      Eigen::Map<CMatrix>(out.data(), op.rows(), d2 * d3).noalias() =
          op * Eigen::Map<const CMatrix>(t.data(), d1, d2 * d3);
      break;
    case 2:
      for (Eigen::Index k = 0; k < d3; ++k) out.slice(k).noalias() = t.slice(k) * op.transpose();
      break;
    default:
      Eigen::Map<CMatrix>(out.data(), d1 * d2, op.rows()).noalias() =
          Eigen::Map<const CMatrix>(t.data(), d1 * d2, d3) * op.transpose();
      break;
  }
  return out;
}

CMatrix unfolding_gram(const Tensor3& t, int axis) {
  check_axis(axis);
  const auto [d1, d2, d3] = t.dims();
  switch (axis) {
    case 1: {
      const Eigen::Map<const CMatrix> u(t.data(), d1, d2 * d3);
      CMatrix g = CMatrix::Zero(d1, d1);
      g.selfadjointView<Eigen::Lower>().rankUpdate(u);
      return g.selfadjointView<Eigen::Lower>();
    }
    case 2: {
      // unfold_2 = [S_0^T, S_1^T, ...] so the Gram is sum_k conj(S_k^H S_k).
      CMatrix g = CMatrix::Zero(d2, d2);
      for (Eigen::Index k = 0; k < d3; ++k) g.noalias() += t.slice(k).adjoint() * t.slice(k);
      return g.conjugate();
    }
    default: {
      const Eigen::Map<const CMatrix> u(t.data(), d1 * d2, d3);
      CMatrix g = (u.adjoint() * u).conjugate();
      return g;
    }
  }
}

}  // namespace isac
