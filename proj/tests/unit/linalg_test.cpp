#include <gtest/gtest.h>

#include <vector>

#include "isac/linalg.hpp"
#include "isac/random.hpp"

namespace isac {
namespace {

CMatrix random_psd(Eigen::Index n, Eigen::Index rank, std::uint64_t seed) {
  Rng rng(seed);
  const CMatrix g = rng.complex_normal_matrix(n, rank);
  return g * g.adjoint();
}

TEST(Kron, MatchesIndexFormula) {
  Rng rng(3);
  const CMatrix a = rng.complex_normal_matrix(3, 2);
  const CMatrix b = rng.complex_normal_matrix(2, 4);
  const CMatrix k = kron(a, b);
  ASSERT_EQ(k.rows(), 6);
  ASSERT_EQ(k.cols(), 8);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 2; ++j)
      for (Eigen::Index p = 0; p < 2; ++p)
        for (Eigen::Index q = 0; q < 4; ++q) EXPECT_EQ(k(i * 2 + p, j * 4 + q), a(i, j) * b(p, q));
}

TEST(Kron, VecIdentity) {
  // vec(B X A^T) = (A kron B) vec(X), with column-stacking vec.
  Rng rng(4);
  const CMatrix a = rng.complex_normal_matrix(3, 3);
  const CMatrix b = rng.complex_normal_matrix(2, 2);
  const CMatrix x = rng.complex_normal_matrix(2, 3);
  const CMatrix lhs = b * x * a.transpose();
  const CVector rhs = kron(a, b) * Eigen::Map<const CVector>(x.data(), x.size());
  EXPECT_LT((Eigen::Map<const CVector>(lhs.data(), lhs.size()) - rhs).norm(), 1e-12);
}

TEST(Hermitian, DefectAndCheck) {
  CMatrix a = random_psd(5, 5, 1);
  EXPECT_TRUE(is_hermitian(a));
  EXPECT_EQ(hermitian_defect(CMatrix::Zero(3, 3)), 0.0);
  a(0, 1) += cd(1e-3, 0.0);
  EXPECT_FALSE(is_hermitian(a));
  EXPECT_THROW(hermitian_eig(a), NumericalError);
}

TEST(HermitianEig, ReconstructsAndSortsDescending) {
  const CMatrix a = random_psd(6, 6, 2);
  const HermitianEig e = hermitian_eig(a);
  for (Eigen::Index k = 1; k < e.values.size(); ++k) EXPECT_GE(e.values(k - 1), e.values(k));
  const CMatrix back = e.vectors * e.values.cast<cd>().asDiagonal() * e.vectors.adjoint();
  EXPECT_LT((back - a).norm() / a.norm(), 1e-12);
  EXPECT_LT((e.vectors.adjoint() * e.vectors - CMatrix::Identity(6, 6)).norm(), 1e-12);
}

TEST(Toeplitz, ComplexRowFollowsHermitianLayout) {
  const std::vector<cd> r = {cd(2, 0), cd(0.5, 0.25), cd(-0.1, 0.3)};
  const CMatrix t = toeplitz_from_row(std::span<const cd>(r));
  for (Eigen::Index l = 0; l < 3; ++l) {
    for (Eigen::Index m = 0; m < 3; ++m) {
      const cd want = l >= m ? r[static_cast<std::size_t>(l - m)] : std::conj(r[static_cast<std::size_t>(m - l)]);
      EXPECT_EQ(t(l, m), want);
    }
  }
  const std::vector<double> rr = {1.0, 0.5, 0.25, 0.125};
  const CMatrix s = toeplitz_from_row(std::span<const double>(rr));
  EXPECT_EQ(s(3, 0), cd(0.125, 0.0));
  EXPECT_EQ(s(0, 3), cd(0.125, 0.0));
}

TEST(PsdRoots, SquareAndInverseSquareRoot) {
  const CMatrix a = random_psd(5, 5, 7) + CMatrix::Identity(5, 5);
  const CMatrix s = sqrt_psd(a);
  EXPECT_LT((s * s - a).norm() / a.norm(), 1e-12);
  const CMatrix w = inv_sqrt_psd(a, 0.0);
  EXPECT_LT((w * a * w - CMatrix::Identity(5, 5)).norm(), 1e-10);
  // With a ridge: (A + r I)^(-1/2).
  const CMatrix wr = inv_sqrt_psd(a, 0.5);
  const CMatrix ar = a + 0.5 * CMatrix::Identity(5, 5);
  EXPECT_LT((wr * ar * wr - CMatrix::Identity(5, 5)).norm(), 1e-10);
}

TEST(PsdRoots, RankDeficientSquareRootClipsNegatives) {
  const CMatrix a = random_psd(6, 2, 8);
  const CMatrix s = sqrt_psd(a);
  EXPECT_LT((s * s - a).norm() / a.norm(), 1e-10);
}

TEST(RequirePsd, RejectsIndefinite) {
  CMatrix a = CMatrix::Identity(3, 3);
  EXPECT_NO_THROW(require_psd(a, "I"));
  a(2, 2) = -0.5;
  EXPECT_THROW(require_psd(a, "A"), NumericalError);
}

TEST(PseudoInverse, PenroseConditions) {
  Rng rng(9);
  const CMatrix h = rng.complex_normal_matrix(3, 7);
  const CMatrix p = pseudo_inverse(h);
  EXPECT_LT((h * p * h - h).norm(), 1e-12);
  EXPECT_LT((p * h * p - p).norm(), 1e-12);
  EXPECT_LT(((h * p).adjoint() - h * p).norm(), 1e-12);
  EXPECT_LT(((p * h).adjoint() - p * h).norm(), 1e-12);
}

TEST(NullSpaceProjector, IdempotentHermitianAndAnnihilatesRows) {
  Rng rng(10);
  const CMatrix h = rng.complex_normal_matrix(2, 8);
  const CMatrix p = null_space_projector(h);
  EXPECT_LT((p * p - p).norm(), 1e-12);
  EXPECT_LT((p.adjoint() - p).norm(), 1e-12);
  EXPECT_LT((h * p).norm(), 1e-12);
  EXPECT_NEAR(p.trace().real(), 6.0, 1e-12);
}

TEST(RelativeFrobenius, KnownValue) {
  const CMatrix truth = CMatrix::Identity(4, 4);
  const CMatrix est = 1.5 * truth;
  EXPECT_DOUBLE_EQ(relative_frobenius_sq(est, truth), 0.25);
}

}  // namespace
}  // namespace isac
