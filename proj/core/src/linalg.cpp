#include "isac/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace isac {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double hermitian_defect(const CMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

bool is_hermitian(const CMatrix& a, double rel_tol) {
  return a.rows() == a.cols() && hermitian_defect(a) <= rel_tol;
}

HermitianEig hermitian_eig(const CMatrix& a, const LinalgTolerances& tol) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("hermitian_eig: matrix is not square");
  }
  if (!is_hermitian(a, tol.hermitian_rel)) {
    throw NumericalError("hermitian_eig: matrix is not Hermitian (defect " +
                         std::to_string(hermitian_defect(a)) + ")");
  }
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermitian_eig: eigen-solver did not converge");
  }
  const Eigen::Index n = a.rows();
  HermitianEig out{RVector(n), CMatrix(n, n)};
  // Eigen returns ascending order.
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = solver.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

CMatrix toeplitz_from_row(std::span<const cd> r) {
  if (r.empty()) throw std::invalid_argument("toeplitz_from_row: empty row");
  const auto n = static_cast<Eigen::Index>(r.size());
  CMatrix t(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index l = 0; l < n; ++l) {
      t(l, m) = l >= m ? r[l - m] : std::conj(r[m - l]);
    }
  }
  return t;
}

CMatrix toeplitz_from_row(std::span<const double> r) {
  std::vector<cd> c(r.begin(), r.end());
  return toeplitz_from_row(std::span<const cd>(c));
}

namespace {

void check_spectrum(const RVector& values, const char* what, const LinalgTolerances& tol) {
  const double scale = values.cwiseAbs().maxCoeff();
  const double lowest = values.minCoeff();
  if (scale > 0.0 && lowest < -tol.psd_floor_rel * scale) {
    throw NumericalError(std::string(what) + ": matrix is not positive semi-definite (lowest eigenvalue " +
                         std::to_string(lowest) + ", largest " + std::to_string(scale) + ")");
  }
}

}  // namespace

void require_psd(const CMatrix& a, const char* what, const LinalgTolerances& tol) {
  check_spectrum(hermitian_eig(a, tol).values, what, tol);
}

CMatrix inv_sqrt_psd(const CMatrix& a, double ridge, const LinalgTolerances& tol) {
  if (ridge < 0.0) throw std::invalid_argument("inv_sqrt_psd: negative ridge");
  const HermitianEig eig = hermitian_eig(a, tol);
  check_spectrum(eig.values, "inv_sqrt_psd", tol);
  RVector scale(eig.values.size());
  for (Eigen::Index k = 0; k < scale.size(); ++k) {
    const double shifted = std::max(eig.values(k), 0.0) + ridge;
    if (shifted <= 0.0) throw NumericalError("inv_sqrt_psd: singular matrix and zero ridge");
    scale(k) = 1.0 / std::sqrt(shifted);
  }
  return eig.vectors * scale.asDiagonal() * eig.vectors.adjoint();
}

CMatrix sqrt_psd(const CMatrix& a, const LinalgTolerances& tol) {
  const HermitianEig eig = hermitian_eig(a, tol);
  check_spectrum(eig.values, "sqrt_psd", tol);
  const RVector root = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * root.asDiagonal() * eig.vectors.adjoint();
}

CMatrix pseudo_inverse(const CMatrix& a, double rel_cutoff) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  CMatrix out = CMatrix::Zero(a.cols(), a.rows());
  if (s.size() == 0 || s(0) == 0.0) return out;
  const double cutoff = rel_cutoff * s(0);
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) <= cutoff) break;
    out += svd.matrixV().col(k) * (1.0 / s(k)) * svd.matrixU().col(k).adjoint();
  }
  return out;
}

CMatrix null_space_projector(const CMatrix& h, double rel_cutoff) {
  const Eigen::Index n = h.cols();
  CMatrix proj = CMatrix::Identity(n, n);
  if (h.rows() == 0) return proj;
  Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return proj;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) <= rel_cutoff * s(0)) break;
    proj -= svd.matrixV().col(k) * svd.matrixV().col(k).adjoint();
  }
  return proj;
}

double relative_frobenius_sq(const CMatrix& estimate, const CMatrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw std::invalid_argument("relative_frobenius_sq: shape mismatch");
  }
  const double denom = truth.squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("relative_frobenius_sq: reference is zero");
  return (estimate - truth).squaredNorm() / denom;
}

}  // namespace isac
