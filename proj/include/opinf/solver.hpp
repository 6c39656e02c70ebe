#ifndef OPINF_SOLVER_HPP
#define OPINF_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "opinf/error.hpp"
#include "opinf/quadform.hpp"

//
// Regularized least-squares inference of quadratic ROM operators.
//
// With data matrix D = [1 | Qhat^T | kron_compact(Qhat)^T | U^T] (k x d) and derivative
// data R (r x k), the operators O = [c A H B] (r x d) minimize
//
//   ||D O^T - R^T||_F^2 + ||Gamma O^T||_F^2,   Gamma = diag(lambda1, ..., lambda2, ..., lambda1)
//
// where lambda2 sits on the quadratic block and lambda1 everywhere else. The minimizer solves
// (D^T D + Gamma^T Gamma) O^T = D^T R^T, so once D^T D and D^T R^T are cached each new
// (lambda1, lambda2) costs one d x d Cholesky factorization, independent of n and k.
//
namespace opinf
{

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct RomOperators
{
  VectorXd c;  // r
  MatrixXd A;  // r x r
  MatrixXd H;  // r x r(r+1)/2
  MatrixXd B;  // r x m

  Index r() const { return c.size(); }
  Index m() const { return B.cols(); }

  static RomOperators zeros(Index r, Index m)
  {
    return {VectorXd::Zero(r), MatrixXd::Zero(r, r), MatrixXd::Zero(r, compact_dim(r)),
            MatrixXd::Zero(r, m)};
  }

  // Splits O = [c A H B] (r x d(r, m)) into blocks.
  static RomOperators from_stacked(const Eigen::Ref<const MatrixXd> &O, Index m)
  {
    const Index r = O.rows();
    if (O.cols() != data_dim(r, m))
    {
      throw DimensionError("RomOperators: stacked operator has " + std::to_string(O.cols()) +
                           " columns, expected d(r, m) = " + std::to_string(data_dim(r, m)));
    }
    const Index s = compact_dim(r);
    return {O.col(0), O.middleCols(1, r), O.middleCols(1 + r, s), O.middleCols(1 + r + s, m)};
  }

  MatrixXd stacked() const
  {
    MatrixXd O(r(), data_dim(r(), m()));
    O << c, A, H, B;
    return O;
  }

  void check() const
  {
    const Index n = r();
    if (A.rows() != n || A.cols() != n || H.rows() != n || H.cols() != compact_dim(n) ||
        B.rows() != n)
    {
      throw DimensionError("RomOperators: inconsistent operator shapes for r = " +
                           std::to_string(n));
    }
  }
};

struct DataMatrix
{
  MatrixXd D;  // k x d(r, m)
  Index r = 0;
  Index m = 0;

  Index k() const { return D.rows(); }
};

struct GramCache
{
  MatrixXd DtD;   // d x d, symmetric positive semidefinite
  MatrixXd DtRt;  // d x r
  Index r = 0;
  Index m = 0;
  Index k = 0;

  Index d() const { return DtD.rows(); }
};

struct RegPair
{
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  friend bool operator==(const RegPair &, const RegPair &) = default;
};

// Diagonal of Gamma for a given (r, m): lambda2 on the quadratic columns, lambda1 elsewhere.
inline VectorXd regularizer_diagonal(Index r, Index m, const RegPair &reg)
{
  VectorXd g = VectorXd::Constant(data_dim(r, m), reg.lambda1);
  g.segment(1 + r, compact_dim(r)).setConstant(reg.lambda2);
  return g;
}

namespace detail
{

inline void check_columns(Index qhat_cols, Index u_rows, Index u_cols, const char *who)
{
  if (u_rows > 0 && u_cols != qhat_cols)
  {
    throw DimensionError(std::string(who) + ": state data has " + std::to_string(qhat_cols) +
                         " columns but inputs have " + std::to_string(u_cols));
  }
}

// Fills rows [0, cols) of out (cols x d) with data-matrix rows for columns [j0, j0+cols).
inline void fill_data_rows(const Eigen::Ref<const MatrixXd> &Qhat, const Eigen::Ref<const MatrixXd> &U,
                           Index j0, Index cols, Eigen::Ref<MatrixXd> out)
{
  const Index r = Qhat.rows();
  const Index s = compact_dim(r);
  const Index m = U.rows();
  out.col(0).setOnes();
  out.middleCols(1, r) = Qhat.middleCols(j0, cols).transpose();
  VectorXd kron(s);
  for (Index j = 0; j < cols; j++)
  {
    kron_compact_into(Qhat.col(j0 + j), kron);
    out.block(j, 1 + r, 1, s) = kron.transpose();
  }
  if (m > 0)
  {
    out.middleCols(1 + r + s, m) = U.middleCols(j0, cols).transpose();
  }
}

inline void symmetrize_from_lower(MatrixXd &M)
{
  MatrixXd full = M.selfadjointView<Eigen::Lower>();
  M = std::move(full);
}

}  // namespace detail

inline DataMatrix build_data_matrix(const Eigen::Ref<const MatrixXd> &Qhat,
                                    const Eigen::Ref<const MatrixXd> &U)
{
  detail::check_columns(Qhat.cols(), U.rows(), U.cols(), "build_data_matrix");
  const Index r = Qhat.rows();
  const Index m = U.rows();
  DataMatrix out{MatrixXd(Qhat.cols(), data_dim(r, m)), r, m};
  detail::fill_data_rows(Qhat, U, 0, Qhat.cols(), out.D);
  return out;
}

inline DataMatrix build_data_matrix(const Eigen::Ref<const MatrixXd> &Qhat)
{
  return build_data_matrix(Qhat, MatrixXd(0, Qhat.cols()));
}

inline GramCache build_gram_cache(const DataMatrix &data, const Eigen::Ref<const MatrixXd> &R)
{
  if (R.cols() != data.k())
  {
    throw DimensionError("build_gram_cache: derivative data has " + std::to_string(R.cols()) +
                         " columns, data matrix has " + std::to_string(data.k()) + " rows");
  }
  const Index d = data.D.cols();
  GramCache cache{MatrixXd::Zero(d, d), data.D.transpose() * R.transpose(), R.rows(), data.m,
                  data.k()};
  cache.DtD.selfadjointView<Eigen::Lower>().rankUpdate(data.D.transpose());
  detail::symmetrize_from_lower(cache.DtD);
  return cache;
}

// Accumulates the Gram products block by block without materializing the k x d data matrix.
inline GramCache build_gram_cache(const Eigen::Ref<const MatrixXd> &Qhat,
                                  const Eigen::Ref<const MatrixXd> &U,
                                  const Eigen::Ref<const MatrixXd> &R, Index block = 2048)
{
  detail::check_columns(Qhat.cols(), U.rows(), U.cols(), "build_gram_cache");
  if (R.cols() != Qhat.cols() || R.rows() != Qhat.rows())
  {
    throw DimensionError("build_gram_cache: derivative data must be " +
                         std::to_string(Qhat.rows()) + " x " + std::to_string(Qhat.cols()));
  }
  const Index r = Qhat.rows();
  const Index m = U.rows();
  const Index k = Qhat.cols();
  const Index d = data_dim(r, m);
  GramCache cache{MatrixXd::Zero(d, d), MatrixXd::Zero(d, r), r, m, k};
  MatrixXd rows(std::min(block, k), d);
  for (Index j0 = 0; j0 < k; j0 += block)
  {
    const Index cols = std::min(block, k - j0);
    auto chunk = rows.topRows(cols);
    detail::fill_data_rows(Qhat, U, j0, cols, chunk);
    cache.DtD.selfadjointView<Eigen::Lower>().rankUpdate(chunk.transpose());
    cache.DtRt.noalias() += chunk.transpose() * R.middleCols(j0, cols).transpose();
  }
  detail::symmetrize_from_lower(cache.DtD);
  return cache;
}

inline GramCache build_gram_cache(const Eigen::Ref<const MatrixXd> &Qhat,
                                  const Eigen::Ref<const MatrixXd> &R)
{
  return build_gram_cache(Qhat, MatrixXd(0, Qhat.cols()), R);
}

namespace detail
{

// Unblocked Cholesky used only to locate the failing pivot after Eigen's LLT reports failure.
inline Index first_bad_pivot(MatrixXd M)
{
  const Index d = M.rows();
  for (Index j = 0; j < d; j++)
  {
    double diag = M(j, j) - M.row(j).head(j).squaredNorm();
    if (!(diag > 0.0) || !std::isfinite(diag))
    {
      return j;
    }
    const double ljj = std::sqrt(diag);
    M(j, j) = ljj;
    for (Index i = j + 1; i < d; i++)
    {
      M(i, j) = (M(i, j) - M.row(i).head(j).dot(M.row(j).head(j))) / ljj;
    }
  }
  return d;
}

}  // namespace detail

// Solves the modified normal equations with one shared Cholesky factorization for all r
// right-hand sides.
inline RomOperators solve_regularized(const GramCache &cache, const RegPair &reg)
{
  if (!(reg.lambda1 >= 0.0) || !(reg.lambda2 >= 0.0))
  {
    throw DomainError("solve_regularized: regularization parameters must be nonnegative");
  }
  MatrixXd M = cache.DtD;
  M.diagonal() += regularizer_diagonal(cache.r, cache.m, reg).cwiseAbs2();
  Eigen::LLT<MatrixXd> llt(M);
  // LLT only reads the lower triangle; a non-finite factor also counts as breakdown.
  if (llt.info() != Eigen::Success || !llt.matrixLLT().diagonal().allFinite() ||
      (llt.matrixLLT().diagonal().array() <= 0.0).any())
  {
    const Index pivot = detail::first_bad_pivot(M);
    throw FactorizationError("solve_regularized: D^T D + Gamma^T Gamma is not positive definite "
                             "(pivot " + std::to_string(pivot) + ", lambda1 = " +
                               std::to_string(reg.lambda1) + ", lambda2 = " +
                               std::to_string(reg.lambda2) + ")",
                             pivot);
  }
  const MatrixXd Ot = llt.solve(cache.DtRt);
  return RomOperators::from_stacked(Ot.transpose(), cache.m);
}

// Unregularized least squares via column-pivoted QR of D itself. This avoids squaring the
// condition number and is the lambda = 0 route.
inline RomOperators solve_lstsq(const DataMatrix &data, const Eigen::Ref<const MatrixXd> &R)
{
  if (R.cols() != data.k())
  {
    throw DimensionError("solve_lstsq: derivative data has " + std::to_string(R.cols()) +
                         " columns, data matrix has " + std::to_string(data.k()) + " rows");
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(data.D);
  if (qr.rank() < data.D.cols())
  {
    throw RankDeficientError("solve_lstsq: data matrix has rank " + std::to_string(qr.rank()) +
                             " < d(r, m) = " + std::to_string(data.D.cols()));
  }
  const MatrixXd Ot = qr.solve(R.transpose());
  return RomOperators::from_stacked(Ot.transpose(), data.m);
}

// Value of the regularized objective at O.
inline double regularized_objective(const DataMatrix &data, const Eigen::Ref<const MatrixXd> &R,
                                    const RomOperators &ops, const RegPair &reg)
{
  const MatrixXd Ot = ops.stacked().transpose();
  const VectorXd g = regularizer_diagonal(data.r, data.m, reg);
  return (data.D * Ot - R.transpose()).squaredNorm() + (g.asDiagonal() * Ot).squaredNorm();
}

}  // namespace opinf

#endif  // OPINF_SOLVER_HPP
