#include <gtest/gtest.h>

#include "opinf/quadform.hpp"
#include "test_util.hpp"

using namespace opinf;
using opinf::testing::random_matrix;
using opinf::testing::random_vector;

TEST(CompactDim, SmallValues)
{
  EXPECT_EQ(compact_dim(1), 1);
  EXPECT_EQ(compact_dim(2), 3);
  EXPECT_EQ(compact_dim(43), 946);
  EXPECT_THROW(compact_dim(0), DimensionError);
}

TEST(DataDim, TableValues)
{
  EXPECT_EQ(data_dim(22, 1), 277);
  EXPECT_EQ(data_dim(36, 1), 704);
  EXPECT_EQ(data_dim(1, 0), 3);
}

TEST(DataDim, InputColumnsAddLinearly)
{
  for (Index r = 1; r <= 30; r++)
  {
    for (Index m = 0; m <= 5; m++)
    {
      EXPECT_EQ(data_dim(r, m) - data_dim(r, 0), m);
    }
  }
}

TEST(CompactIndexMap, LexicographicOrder)
{
  const CompactIndexMap map(3);
  const std::vector<std::pair<Index, Index>> expected = {{0, 0}, {0, 1}, {0, 2},
                                                         {1, 1}, {1, 2}, {2, 2}};
  EXPECT_EQ(map.pairs, expected);
  for (Index r = 1; r < 12; r++)
  {
    EXPECT_EQ(CompactIndexMap(r).size(), compact_dim(r));
  }
}

TEST(KronCompact, Enumeration)
{
  EXPECT_DOUBLE_EQ(kron_compact(VectorXd::Constant(1, 3.0))(0), 9.0);

  VectorXd q2(2);
  q2 << 1, 2;
  VectorXd e2(3);
  e2 << 1, 2, 4;
  EXPECT_EQ(kron_compact(q2), e2);

  VectorXd q3(3);
  q3 << 1, 2, 3;
  VectorXd e3(6);
  e3 << 1, 2, 3, 4, 6, 9;
  EXPECT_EQ(kron_compact(q3), e3);
}

TEST(KronCompact, MatchesIndexMap)
{
  const VectorXd q = random_vector(7, 11);
  const VectorXd k = kron_compact(q);
  const CompactIndexMap map(7);
  for (Index p = 0; p < map.size(); p++)
  {
    const auto [i, j] = map.pairs[static_cast<std::size_t>(p)];
    EXPECT_DOUBLE_EQ(k(p), q(i) * q(j));
  }
}

TEST(KronCompact, IsQuadratic)
{
  const VectorXd q = random_vector(5, 3);
  for (double alpha : {-2.5, 0.0, 0.3, 7.0})
  {
    EXPECT_LE((kron_compact(alpha * q) - alpha * alpha * kron_compact(q)).norm(),
              1e-14 * (1.0 + alpha * alpha));
  }
}

TEST(KronCompactColumns, IdentityAndBruteForce)
{
  const MatrixXd I = MatrixXd::Identity(2, 2);
  MatrixXd expected(3, 2);
  expected << 1, 0, 0, 0, 0, 1;
  EXPECT_EQ(kron_compact_columns(I), expected);

  const MatrixXd Q = random_matrix(3, 5, 42);
  const MatrixXd K = kron_compact_columns(Q);
  ASSERT_EQ(K.rows(), 6);
  ASSERT_EQ(K.cols(), 5);
  for (Index j = 0; j < 5; j++)
  {
    EXPECT_EQ(K.col(j), kron_compact(Q.col(j)));
  }
  EXPECT_EQ(kron_compact_columns(Q.col(2)), kron_compact(Q.col(2)));
}

TEST(CompactFromFull, SymmetryCollapse)
{
  MatrixXd h1(1, 1);
  h1 << 5.0;
  EXPECT_EQ(compact_from_full(h1), h1);

  MatrixXd H(2, 4);
  H << 1, 2, 3, 4,  //
    5, 6, 7, 8;
  MatrixXd expected(2, 3);
  expected << 1, 2 + 3, 4,  //
    5, 6 + 7, 8;
  EXPECT_EQ(compact_from_full(H), expected);

  EXPECT_THROW(compact_from_full(MatrixXd::Zero(2, 5)), DimensionError);
  EXPECT_THROW(compact_from_full(MatrixXd::Zero(2, 0)), DimensionError);
}

TEST(CompactFromFull, ActionMatchesFullKronecker)
{
  const Index r = 3;
  const MatrixXd H_full = random_matrix(r, r * r, 7);
  const MatrixXd H = compact_from_full(H_full);
  for (std::uint64_t s = 0; s < 20; s++)
  {
    const VectorXd q = random_vector(r, 100 + s, -3.0, 3.0);
    VectorXd qq(r * r);
    for (Index i = 0; i < r; i++)
    {
      for (Index j = 0; j < r; j++)
      {
        qq(i * r + j) = q(i) * q(j);
      }
    }
    const VectorXd full = H_full * qq;
    EXPECT_LE((H * kron_compact(q) - full).norm(), 1e-12 * (1.0 + full.norm()));
  }
}
