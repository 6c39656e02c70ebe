#ifndef OPINF_QUADFORM_HPP
#define OPINF_QUADFORM_HPP

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "opinf/error.hpp"

//
// Compact Kronecker algebra for quadratic models.
//
// A quadratic term H (q ⊗ q) has only r(r+1)/2 distinct monomials q_i q_j, i <= j. Every
// module in this library stores quadratic operators against the compact monomial vector in
// lexicographic (i, j) order: (0,0), (0,1), ..., (0,r-1), (1,1), ..., (r-1,r-1).
//
namespace opinf
{

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Number of unique quadratic monomials of an r-vector.
inline Index compact_dim(Index r)
{
  if (r < 1)
  {
    throw DimensionError("compact_dim: reduced dimension must be >= 1, got " +
                         std::to_string(r));
  }
  return r * (r + 1) / 2;
}

// Column count of the regression data matrix: constant, linear, quadratic and input blocks.
inline Index data_dim(Index r, Index m)
{
  if (m < 0)
  {
    throw DimensionError("data_dim: input dimension must be >= 0, got " + std::to_string(m));
  }
  return 1 + r + compact_dim(r) + m;
}

struct CompactIndexMap
{
  Index r = 0;
  std::vector<std::pair<Index, Index>> pairs;

  explicit CompactIndexMap(Index dim) : r(dim)
  {
    pairs.reserve(static_cast<std::size_t>(compact_dim(dim)));
    for (Index i = 0; i < r; i++)
    {
      for (Index j = i; j < r; j++)
      {
        pairs.emplace_back(i, j);
      }
    }
  }

  Index size() const { return static_cast<Index>(pairs.size()); }
};

// Writes the compact Kronecker product of q into out (length r(r+1)/2).
template <typename In, typename Out>
inline void kron_compact_into(const Eigen::MatrixBase<In> &q, Eigen::MatrixBase<Out> const &out_)
{
  auto &out = const_cast<Eigen::MatrixBase<Out> &>(out_);
  const Index r = q.size();
  Index p = 0;
  for (Index i = 0; i < r; i++)
  {
    const double qi = q(i);
    for (Index j = i; j < r; j++)
    {
      out(p++) = qi * q(j);
    }
  }
}

inline VectorXd kron_compact(const Eigen::Ref<const VectorXd> &q)
{
  VectorXd out(compact_dim(q.size()));
  kron_compact_into(q, out);
  return out;
}

// Column-wise compact Kronecker product of an r x k matrix.
inline MatrixXd kron_compact_columns(const Eigen::Ref<const MatrixXd> &Q)
{
  MatrixXd out(compact_dim(Q.rows()), Q.cols());
  for (Index j = 0; j < Q.cols(); j++)
  {
    kron_compact_into(Q.col(j), out.col(j));
  }
  return out;
}

// Integer square root of the column count, or -1 if it is not a perfect square.
inline Index exact_sqrt(Index value)
{
  auto s = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(value))));
  while (s * s > value)
  {
    s--;
  }
  while ((s + 1) * (s + 1) <= value)
  {
    s++;
  }
  return s * s == value ? s : -1;
}

// Converts an operator acting on the full Kronecker product q ⊗ q (column i*r + j holds the
// coefficient of q_i q_j) to one acting on kron_compact(q). Off-diagonal coefficients (i,j)
// and (j,i) are summed so both forms have identical action.
inline MatrixXd compact_from_full(const Eigen::Ref<const MatrixXd> &H_full)
{
  const Index r = exact_sqrt(H_full.cols());
  if (r < 1)
  {
    throw DimensionError("compact_from_full: column count " + std::to_string(H_full.cols()) +
                         " is not a positive perfect square");
  }
  MatrixXd H(H_full.rows(), compact_dim(r));
  Index p = 0;
  for (Index i = 0; i < r; i++)
  {
    H.col(p++) = H_full.col(i * r + i);
    for (Index j = i + 1; j < r; j++)
    {
      H.col(p++) = H_full.col(i * r + j) + H_full.col(j * r + i);
    }
  }
  return H;
}

}  // namespace opinf

#endif  // OPINF_QUADFORM_HPP
