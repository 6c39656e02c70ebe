#include <gtest/gtest.h>

#include "opinf/pod.hpp"
#include "opinf/preprocess.hpp"
#include "test_util.hpp"

using namespace opinf;
using opinf::testing::random_matrix;
using opinf::testing::rel_err;

namespace
{

VariableLayout two_vars(Index cells)
{
  return VariableLayout({{"rho", VariableKind::nonnegative}, {"u", VariableKind::signed_}}, cells);
}

}  // namespace

TEST(VariableLayout, RowsAndLookup)
{
  const auto layout = two_vars(4);
  EXPECT_EQ(layout.rows(), 8);
  EXPECT_EQ(layout.index_of("u"), 1);
  EXPECT_EQ(layout.offset(1), 4);
  EXPECT_FALSE(layout.find("T").has_value());
  EXPECT_THROW(layout.index_of("T"), DomainError);
  EXPECT_THROW(VariableLayout({{"a", VariableKind::signed_}, {"a", VariableKind::signed_}}, 2),
               DimensionError);
}

TEST(Transform, IdentityLeavesDataUnchanged)
{
  const auto layout = two_vars(3);
  const MatrixXd Z = random_matrix(6, 5, 1, 0.1, 2.0);
  const auto spec = TransformSpec::identity(layout);
  EXPECT_EQ(apply_transform(Z, spec), Z);
  EXPECT_EQ(invert_transform(Z, spec), Z);
}

TEST(Transform, ReciprocalOfConstantBlock)
{
  const auto layout = VariableLayout({{"rho", VariableKind::nonnegative}}, 4);
  const TransformSpec spec(layout, {{{"xi", VariableKind::nonnegative}, ChannelOp::reciprocal, "rho"}});
  const MatrixXd Z = MatrixXd::Constant(4, 3, 2.0);
  EXPECT_EQ(apply_transform(Z, spec), MatrixXd::Constant(4, 3, 0.5));
}

TEST(Transform, ScaledRatio)
{
  const auto layout = VariableLayout({{"rhoY", VariableKind::nonnegative}}, 1);
  const TransformSpec spec(layout, {{{"c", VariableKind::nonnegative}, ChannelOp::scaled_ratio, "rhoY", 16.04}});
  MatrixXd Z(1, 1);
  Z << 32.08;
  EXPECT_NEAR(apply_transform(Z, spec)(0, 0), 2.0, 1e-15);
}

TEST(Transform, ReciprocalRejectsNonpositive)
{
  const auto layout = VariableLayout({{"rho", VariableKind::nonnegative}}, 3);
  const TransformSpec spec(layout, {{{"xi", VariableKind::nonnegative}, ChannelOp::reciprocal, "rho"}});
  MatrixXd Z = MatrixXd::Ones(3, 4);
  Z(1, 2) = 0.0;
  try
  {
    apply_transform(Z, spec);
    FAIL() << "expected DomainError";
  }
  catch (const DomainError &e)
  {
    const std::string what = e.what();
    EXPECT_NE(what.find("rho"), std::string::npos);
    EXPECT_NE(what.find("column 2"), std::string::npos);
  }
  MatrixXd Q = MatrixXd::Ones(3, 2);
  Q(0, 1) = 0.0;
  EXPECT_THROW(invert_transform(Q, spec), DomainError);
}

TEST(Transform, RoundTrips)
{
  const auto layout = two_vars(5);
  const MatrixXd Z = random_matrix(10, 7, 9, 0.2, 3.0);

  const TransformSpec recip(layout, {{{"xi", VariableKind::nonnegative}, ChannelOp::reciprocal, "rho"},
                                     {{"u", VariableKind::signed_}, ChannelOp::identity, "u"}});
  EXPECT_LE(rel_err(invert_transform(apply_transform(Z, recip), recip), Z), 1e-14);

  const TransformSpec ratio(layout, {{{"c", VariableKind::nonnegative}, ChannelOp::scaled_ratio, "rho", 28.01},
                                     {{"u", VariableKind::signed_}, ChannelOp::identity, "u"}});
  EXPECT_LE(rel_err(invert_transform(apply_transform(Z, ratio), ratio), Z), 1e-14);
}

TEST(Transform, RedundantChannelsUseDeclaredSource)
{
  // Both rho and 1/rho are learned; rho is rebuilt from the reciprocal channel on request.
  const auto layout = VariableLayout({{"rho", VariableKind::nonnegative}}, 2);
  const TransformSpec spec(layout,
                           {{{"rho", VariableKind::nonnegative}, ChannelOp::identity, "rho"},
                            {{"xi", VariableKind::nonnegative}, ChannelOp::reciprocal, "rho"}},
                           {{"rho", "xi"}});
  EXPECT_EQ(spec.target().rows(), 4);
  EXPECT_EQ(spec.reconstruction_channel(0), 1);
  MatrixXd Q(4, 1);
  Q << 100, 100, 0.25, 0.5;  // identity channel deliberately inconsistent
  MatrixXd expected(2, 1);
  expected << 4, 2;
  EXPECT_EQ(invert_transform(Q, spec), expected);

  EXPECT_THROW(TransformSpec(layout, {{{"u", VariableKind::signed_}, ChannelOp::identity, "v"}}),
               DomainError);
}

TEST(Scaling, FitRules)
{
  const auto layout = two_vars(2);
  MatrixXd Q(4, 2);
  Q << 1, 5,  //
    0, 3,     //
    -2, 1,    //
    2, 0;
  const auto params = fit_scaling(Q, layout);
  EXPECT_DOUBLE_EQ(params.scales[0], 5.0);
  EXPECT_DOUBLE_EQ(params.scales[1], 2.0);

  MatrixXd zero = MatrixXd::Zero(4, 3);
  const auto zp = fit_scaling(zero, layout);
  EXPECT_DOUBLE_EQ(zp.scales[0], 1.0);
  EXPECT_DOUBLE_EQ(zp.scales[1], 1.0);
  EXPECT_EQ(apply_scaling(zero, zp), zero);

  Q(0, 0) = -1.0;
  EXPECT_THROW(fit_scaling(Q, layout), DomainError);
}

TEST(Scaling, ApplyDividesByScale)
{
  const auto layout = VariableLayout::single(2);
  MatrixXd Q(2, 1);
  Q << -2, 1;
  ScalingParams params{layout, {2.0}};
  MatrixXd expected(2, 1);
  expected << -1, 0.5;
  EXPECT_EQ(apply_scaling(Q, params), expected);
}

TEST(Scaling, RangeAndZeroPreservationProperty)
{
  for (std::uint64_t seed = 0; seed < 20; seed++)
  {
    const auto layout = two_vars(6);
    MatrixXd Q = random_matrix(12, 9, seed, -4.0, 4.0);
    Q.topRows(6) = Q.topRows(6).cwiseAbs();
    // Sprinkle exact zeros.
    for (Index j = 0; j < Q.cols(); j += 2)
    {
      Q(static_cast<Index>(seed % 12), j) = 0.0;
    }
    const auto params = fit_scaling(Q, layout);
    const MatrixXd S = apply_scaling(Q, params);
    EXPECT_GE(S.topRows(6).minCoeff(), 0.0);
    EXPECT_LE(S.topRows(6).maxCoeff(), 1.0);
    EXPECT_LE(S.bottomRows(6).cwiseAbs().maxCoeff(), 1.0);
    const MatrixXd back = invert_scaling(S, params);
    for (Index i = 0; i < Q.rows(); i++)
    {
      for (Index j = 0; j < Q.cols(); j++)
      {
        if (Q(i, j) == 0.0)
        {
          EXPECT_EQ(S(i, j), 0.0);
          EXPECT_EQ(back(i, j), 0.0);
        }
      }
    }
    EXPECT_LE(rel_err(back, Q), 1e-15);
  }
}

TEST(LearningMap, FullRoundTrip)
{
  const auto layout = two_vars(8);
  const MatrixXd Z = random_matrix(16, 11, 5, 0.05, 4.0);
  const TransformSpec spec(layout, {{{"xi", VariableKind::nonnegative}, ChannelOp::reciprocal, "rho"},
                                    {{"u", VariableKind::signed_}, ChannelOp::scaled_ratio, "u", 3.0}});
  const auto map = LearningMap::fit(Z, spec);
  EXPECT_LE(rel_err(map.reverse(map.forward(Z)), Z), 1e-12);
}

TEST(LearningMap, ZeroBlockSurvivesProjection)
{
  // A nonnegative variable that is identically zero stays exactly zero through
  // scale -> project -> reconstruct when the basis comes from the same data.
  const auto layout = VariableLayout({{"c", VariableKind::nonnegative}, {"u", VariableKind::signed_}}, 10);
  MatrixXd Z(20, 30);
  Z.topRows(10).setZero();
  Z.bottomRows(10) = random_matrix(10, 30, 17, -2.0, 2.0);
  const auto map = LearningMap::fit(Z, TransformSpec::identity(layout));
  const MatrixXd Q = map.forward(Z);
  const auto basis = pod(Q, 4);
  const MatrixXd recon = map.reverse(basis.V * project(basis.V, Q));
  EXPECT_TRUE((recon.topRows(10).array() == 0.0).all());
}
