#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support/random_symplectic.hpp"
#include "symcamel/phasespace.hpp"

using namespace symcamel;

TEST(StandardJ, OneDegreeOfFreedom) {
  PhaseMatrix expected(2, 2);
  expected << 0, 1, -1, 0;
  EXPECT_EQ(standard_J(1), expected);
}

TEST(StandardJ, SquareAndOrthogonality) {
  for (int m = 1; m <= 6; ++m) {
    const PhaseMatrix j = standard_J(m);
    const PhaseMatrix id = PhaseMatrix::Identity(2 * m, 2 * m);
    EXPECT_LE((j * j + id).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((j.transpose() * j - id).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((j * j.transpose() - id).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(j.transpose(), PhaseMatrix(-j));
  }
}

TEST(StandardJ, BipartiteIsDirectSum) {
  const PhaseMatrix j = standard_J(Dimensions(1, 1));
  PhaseMatrix expected = PhaseMatrix::Zero(4, 4);
  expected.topLeftCorner(2, 2) = standard_J(1);
  expected.bottomRightCorner(2, 2) = standard_J(1);
  EXPECT_EQ(j, expected);
  EXPECT_EQ(direct_sum(standard_J(2), standard_J(1)), standard_J(Dimensions(2, 1)));
}

TEST(StandardJ, RejectsNonPositiveDimension) {
  EXPECT_THROW(standard_J(0), InvalidDimension);
  EXPECT_THROW(standard_J(-3), InvalidDimension);
  EXPECT_THROW(Dimensions(0, 2), InvalidDimension);
  EXPECT_THROW(Dimensions(1, -1), InvalidDimension);
}

TEST(SymplecticityDefect, ReferenceValues) {
  EXPECT_EQ(symplecticity_defect(PhaseMatrix::Identity(4, 4)), 0.0);
  EXPECT_EQ(symplecticity_defect(standard_J(3)), 0.0);
  // (2I)^T J (2I) - J = 3J.
  EXPECT_DOUBLE_EQ(symplecticity_defect(2.0 * PhaseMatrix::Identity(2, 2)), 3.0);
}

TEST(SymplecticityDefect, RejectsOddSide) {
  EXPECT_THROW(symplecticity_defect(PhaseMatrix::Identity(3, 3)), InvalidDimension);
  EXPECT_THROW(symplecticity_defect(PhaseMatrix::Identity(2, 4)), InvalidDimension);
}

TEST(BlockSplit, IdentityBlocks) {
  const auto b = block_split(PhaseMatrix::Identity(4, 4), Dimensions(1, 1));
  EXPECT_EQ(b.AA, PhaseMatrix::Identity(2, 2));
  EXPECT_EQ(b.BB, PhaseMatrix::Identity(2, 2));
  EXPECT_TRUE(b.AB.isZero(0.0));
  EXPECT_TRUE(b.BA.isZero(0.0));
}

TEST(BlockSplit, ReassembleIsBitwiseIdentityAndSymmetricBlocksTranspose) {
  std::mt19937_64 rng(11);
  for (int na = 1; na <= 3; ++na)
    for (int nb = 0; nb <= 3; ++nb) {
      const Dimensions dims(na, nb);
      const PhaseMatrix m = fixtures::random_spd(dims.phase_dim(), rng);
      const auto b = block_split(m, dims);
      EXPECT_EQ(reassemble(b), m);
      EXPECT_EQ(b.BA, PhaseMatrix(b.AB.transpose()));
      EXPECT_EQ(b.AA, PhaseMatrix(b.AA.transpose()));
    }
}

TEST(BlockSplit, DirectSumHasNoCrossBlocks) {
  std::mt19937_64 rng(3);
  const PhaseMatrix sa = fixtures::random_symplectic(Dimensions::single(2), rng);
  const PhaseMatrix sb = fixtures::random_symplectic(Dimensions::single(1), rng);
  const auto b = block_split(direct_sum(sa, sb), Dimensions(2, 1));
  EXPECT_TRUE(b.AB.isZero(0.0));
  EXPECT_TRUE(b.BA.isZero(0.0));
  EXPECT_EQ(b.AA, sa);
  EXPECT_EQ(b.BB, sb);
}

TEST(BlockSplit, DimensionMismatch) {
  EXPECT_THROW(block_split(PhaseMatrix::Identity(4, 4), Dimensions(2, 1)), InvalidDimension);
}

TEST(SchurComplement, BlockDiagonalReturnsAA) {
  PhaseMatrix p = direct_sum(2.0 * PhaseMatrix::Identity(2, 2), 3.0 * PhaseMatrix::Identity(2, 2));
  const PhaseMatrix s = schur_complement(block_split(p, Dimensions(1, 1)));
  EXPECT_EQ(s, PhaseMatrix(2.0 * PhaseMatrix::Identity(2, 2)));
}

TEST(SchurComplement, HandEvaluatedExample) {
  PhaseMatrix p(4, 4);
  p << 2, 0, 1, 0,  //
      0, 2, 0, 0,   //
      1, 0, 1, 0,   //
      0, 0, 0, 1;
  PhaseMatrix expected(2, 2);
  expected << 1, 0, 0, 2;
  EXPECT_LE((schur_complement(block_split(p, Dimensions(1, 1))) - expected).cwiseAbs().maxCoeff(),
            1e-15);
}

TEST(SchurComplement, SymplecticSymmetricDeterminantIdentity) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Dimensions dims(1 + trial % 2, 1 + trial % 3);
    const PhaseMatrix s = fixtures::random_symplectic(dims, rng);
    const PhaseMatrix p = (s * s.transpose()).inverse();
    const auto b = block_split(p, dims);
    const PhaseMatrix schur = schur_complement(b);
    EXPECT_NEAR(schur.determinant() * b.BB.determinant(), 1.0, 1e-10);
  }
}

TEST(SchurComplement, DeterminantIdentityOnRandomSpd) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;  // 2n up to 12
    const int na = 1 + trial % (n - 1);
    const Dimensions dims(na, n - na);
    const PhaseMatrix p = fixtures::random_spd(dims.phase_dim(), rng);
    const auto b = block_split(p, dims);
    const PhaseMatrix schur = schur_complement(b);
    const double det = p.determinant();
    EXPECT_LE(std::abs(det - schur.determinant() * b.BB.determinant()), 1e-9 * std::max(1.0, std::abs(det)));
    EXPECT_EQ(schur, PhaseMatrix(schur.transpose()));
    EXPECT_EQ(Eigen::LLT<PhaseMatrix>(schur).info(), Eigen::Success);
  }
}

TEST(SchurComplement, SingularBlockIsReported) {
  PhaseMatrix p = PhaseMatrix::Identity(4, 4);
  p(2, 2) = 1e-20;
  EXPECT_THROW(schur_complement(block_split(p, Dimensions(1, 1))), SingularBlock);
  p(2, 2) = -1.0;
  EXPECT_THROW(schur_complement(block_split(p, Dimensions(1, 1))), SingularBlock);
}

TEST(SchurComplement, EmptyBBReturnsAA) {
  const PhaseMatrix p = 3.0 * PhaseMatrix::Identity(2, 2);
  EXPECT_EQ(schur_complement(block_split(p, Dimensions(1, 0))), p);
}

TEST(DirectSum, IdentityAndSymplecticClosure) {
  EXPECT_EQ(direct_sum(PhaseMatrix::Identity(2, 2), PhaseMatrix::Identity(2, 2)),
            PhaseMatrix(PhaseMatrix::Identity(4, 4)));
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const PhaseMatrix a = fixtures::random_symplectic(Dimensions::single(1 + trial % 3), rng);
    const PhaseMatrix b = fixtures::random_symplectic(Dimensions::single(1 + trial % 2), rng);
    const Dimensions dims(1 + trial % 3, 1 + trial % 2);
    const PhaseMatrix s = direct_sum(a, b);
    EXPECT_LE(symplecticity_defect(s, dims), 1e-12);
    EXPECT_LE(symplecticity_defect(s, dims), symplecticity_defect(a) + symplecticity_defect(b) + 1e-15);
  }
  EXPECT_THROW(direct_sum(PhaseMatrix::Identity(3, 3), PhaseMatrix::Identity(2, 2)), InvalidDimension);
}

TEST(Layout, GlobalOrderPermutationMapsForms) {
  for (auto dims : {Dimensions(1, 1), Dimensions(2, 1), Dimensions(1, 3), Dimensions(2, 2)}) {
    const PhaseMatrix q = global_order_permutation(dims);
    EXPECT_EQ(PhaseMatrix(q.transpose() * standard_J(dims.n()) * q), standard_J(dims));
  }
}

TEST(Layout, ModePermutationIsSymplectic) {
  const Dimensions dims(2, 2);
  const PhaseMatrix p = mode_permutation(dims, {3, 0, 2, 1});
  EXPECT_EQ(symplecticity_defect(p, dims), 0.0);
}

TEST(MatrixText, RoundTripIsExact) {
  std::mt19937_64 rng(2);
  const PhaseMatrix m = fixtures::random_symplectic(Dimensions(2, 1), rng);
  std::stringstream ss;
  write_matrix(ss, m);
  EXPECT_EQ(read_matrix(ss), m);
}

TEST(MatrixText, Errors) {
  std::stringstream ragged("1 2\n3\n");
  EXPECT_THROW(read_matrix(ragged), InvalidInput);
  std::stringstream bad("1 x\n");
  EXPECT_THROW(read_matrix(bad), InvalidInput);
  std::stringstream empty("# only a comment\n\n");
  EXPECT_THROW(read_matrix(empty), InvalidInput);
}
