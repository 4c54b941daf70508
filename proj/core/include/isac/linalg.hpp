#pragma once

// Dense complex linear algebra shared by every module.
//
// Matrices are Eigen column-major containers. All vec(.) operations in the
// library stack columns, so vec(H) for an M_UE x M_BS channel matrix places
// the M_UE entries of antenna 0 first, matching C_Tx (x) C_Rx.

#include <complex>
#include <span>
#include <stdexcept>

#include <Eigen/Dense>

namespace isac {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr cd kJ{0.0, 1.0};

/// Raised when a numerical precondition (Hermitian, PSD, conditioning) fails.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tolerances used by the kernels below. ScenarioConfig carries a copy so
/// experiments can override them.
struct LinalgTolerances {
  double hermitian_rel = 1e-12;  // max |A - A^H| relative to max |A|
  double psd_floor_rel = 1e-10;  // lowest admissible eigenvalue, relative
};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues descending.
struct HermitianEig {
  RVector values;
  CMatrix vectors;  // columns are orthonormal eigenvectors
};

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Largest |A - A^H| entry divided by the largest |A| entry (0 for A = 0).
double hermitian_defect(const CMatrix& a);
bool is_hermitian(const CMatrix& a, double rel_tol = LinalgTolerances{}.hermitian_rel);

HermitianEig hermitian_eig(const CMatrix& a, const LinalgTolerances& tol = {});

/// Hermitian Toeplitz matrix with first column r: T[l,m] = r[l-m] for l >= m
/// and conj(r[m-l]) otherwise. For real r this is the symmetric T[l,m] = r[|l-m|].
CMatrix toeplitz_from_row(std::span<const cd> r);
CMatrix toeplitz_from_row(std::span<const double> r);

/// U (Lambda + ridge I)^(-1/2) U^H.
CMatrix inv_sqrt_psd(const CMatrix& a, double ridge, const LinalgTolerances& tol = {});

/// PSD square root U max(Lambda,0)^(1/2) U^H, used to colour white noise.
CMatrix sqrt_psd(const CMatrix& a, const LinalgTolerances& tol = {});

/// Throws NumericalError when the smallest eigenvalue is below
/// -psd_floor_rel * max|lambda|. `what` names the matrix in the message.
void require_psd(const CMatrix& a, const char* what, const LinalgTolerances& tol = {});

/// Moore-Penrose pseudo-inverse from a thin SVD, with singular values below rel_cutoff * sigma_max treated as zero.
CMatrix pseudo_inverse(const CMatrix& a, double rel_cutoff = 1e-10);

/// Orthogonal projector onto the null space of the rows of h: I - h^+ h.
CMatrix null_space_projector(const CMatrix& h, double rel_cutoff = 1e-10);

/// ||a - b||_F^2 / ||b||_F^2.
double relative_frobenius_sq(const CMatrix& estimate, const CMatrix& truth);

}  // namespace isac
