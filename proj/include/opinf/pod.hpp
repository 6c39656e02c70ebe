#ifndef OPINF_POD_HPP
#define OPINF_POD_HPP

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "opinf/error.hpp"

namespace opinf
{

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct RsvdOptions
{
  Index oversampling = 10;
  Index power_iterations = 2;
  std::uint64_t seed = 0;
  // Dense SVD is used whenever min(n, k) is at most this.
  Index dense_threshold = 512;
};

struct PodBasis
{
  MatrixXd V;                 // n x r, orthonormal columns
  VectorXd singular_values;   // leading computed singular values, nonincreasing
  double total_energy = 0.0;  // ||Q||_F^2, the sum of all squared singular values

  Index rank() const { return V.cols(); }
};

namespace detail
{

// Flip each column so its largest-magnitude entry is positive.
inline void normalize_signs(MatrixXd &V)
{
  for (Index j = 0; j < V.cols(); j++)
  {
    Index imax = 0;
    V.col(j).cwiseAbs().maxCoeff(&imax);
    if (V(imax, j) < 0.0)
    {
      V.col(j) *= -1.0;
    }
  }
}

inline MatrixXd orthonormalize(const MatrixXd &Y)
{
  Eigen::HouseholderQR<MatrixXd> qr(Y);
  return qr.householderQ() * MatrixXd::Identity(Y.rows(), Y.cols());
}

struct Factors
{
  MatrixXd U;
  VectorXd sigma;
};

inline Factors dense_svd(const Eigen::Ref<const MatrixXd> &Q, Index keep)
{
  Eigen::BDCSVD<MatrixXd> svd(Q, Eigen::ComputeThinU);
  return {svd.matrixU().leftCols(keep), svd.singularValues()};
}

// Randomized range finder with subspace iteration, then an exact SVD of the small sketch.
inline Factors randomized_svd(const Eigen::Ref<const MatrixXd> &Q, Index rank,
                              const RsvdOptions &opts)
{
  const Index n = Q.rows();
  const Index k = Q.cols();
  const Index width = std::min(rank + opts.oversampling, std::min(n, k));

  std::mt19937_64 gen(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd omega(k, width);
  for (Index j = 0; j < width; j++)
  {
    for (Index i = 0; i < k; i++)
    {
      omega(i, j) = normal(gen);
    }
  }

  MatrixXd Y = orthonormalize(Q * omega);
  for (Index it = 0; it < opts.power_iterations; it++)
  {
    MatrixXd Z = orthonormalize(Q.transpose() * Y);
    Y = orthonormalize(Q * Z);
  }
  MatrixXd sketch = Y.transpose() * Q;  // width x k
  Eigen::BDCSVD<MatrixXd> svd(sketch, Eigen::ComputeThinU);
  return {Y * svd.matrixU().leftCols(rank), svd.singularValues()};
}

}  // namespace detail

// Rank-r POD basis of the snapshot matrix Q (n x k). Deterministic for a fixed seed.
inline PodBasis pod(const Eigen::Ref<const MatrixXd> &Q, Index r, const RsvdOptions &opts = {})
{
  const Index small = std::min(Q.rows(), Q.cols());
  if (r < 1 || r > small)
  {
    throw DimensionError("pod: rank " + std::to_string(r) + " outside [1, min(n, k) = " +
                         std::to_string(small) + "]");
  }
  auto f = small <= opts.dense_threshold ? detail::dense_svd(Q, r)
                                         : detail::randomized_svd(Q, r, opts);
  PodBasis basis{std::move(f.U), std::move(f.sigma), Q.squaredNorm()};
  // range(Q) is orthogonal to every coordinate where Q vanishes identically; drop the
  // rounding residue there so zero rows reconstruct as exact zeros.
  for (Index i = 0; i < Q.rows(); i++)
  {
    if ((Q.row(i).array() == 0.0).all())
    {
      basis.V.row(i).setZero();
    }
  }
  detail::normalize_signs(basis.V);
  return basis;
}

// Leading singular values of Q and its total energy, without forming a basis. Computes
// every singular value when Q is small, otherwise a sketch of the requested width.
inline PodBasis singular_spectrum(const Eigen::Ref<const MatrixXd> &Q, Index sketch_rank,
                                  const RsvdOptions &opts = {})
{
  const Index small = std::min(Q.rows(), Q.cols());
  PodBasis out;
  out.total_energy = Q.squaredNorm();
  if (small <= opts.dense_threshold)
  {
    out.singular_values = Eigen::BDCSVD<MatrixXd>(Q).singularValues();
  }
  else
  {
    out.singular_values =
      detail::randomized_svd(Q, std::clamp<Index>(sketch_rank, 1, small), opts).sigma;
  }
  return out;
}

// (sum_{j<r} sigma_j^2) / total. `total` defaults to the sum over all given values.
inline double cumulative_energy(std::span<const double> sigma, Index r, double total = -1.0)
{
  if (r < 1 || r > static_cast<Index>(sigma.size()))
  {
    throw DimensionError("cumulative_energy: r = " + std::to_string(r) + " outside [1, " +
                         std::to_string(sigma.size()) + "]");
  }
  double head = 0.0;
  double all = 0.0;
  for (std::size_t j = 0; j < sigma.size(); j++)
  {
    const double s2 = sigma[j] * sigma[j];
    all += s2;
    if (static_cast<Index>(j) < r)
    {
      head += s2;
    }
  }
  if (total >= 0.0)
  {
    all = total;
  }
  if (!(all > 0.0))
  {
    throw DomainError("cumulative_energy: spectrum is identically zero");
  }
  return std::min(1.0, head / all);
}

inline double cumulative_energy(const VectorXd &sigma, Index r, double total = -1.0)
{
  return cumulative_energy(std::span<const double>(sigma.data(), static_cast<std::size_t>(sigma.size())), r, total);
}

// Smallest r whose cumulative energy strictly exceeds the threshold.
inline Index select_rank(std::span<const double> sigma, double threshold, double total = -1.0)
{
  if (!(threshold > 0.0 && threshold < 1.0))
  {
    throw DomainError("select_rank: threshold must lie in (0, 1), got " + std::to_string(threshold));
  }
  double all = 0.0;
  for (double s : sigma)
  {
    all += s * s;
  }
  if (total >= 0.0)
  {
    all = total;
  }
  if (!(all > 0.0))
  {
    throw DomainError("select_rank: spectrum is identically zero");
  }
  double head = 0.0;
  for (std::size_t j = 0; j < sigma.size(); j++)
  {
    head += sigma[j] * sigma[j];
    if (head / all > threshold)
    {
      return static_cast<Index>(j + 1);
    }
  }
  throw DomainError("select_rank: threshold " + std::to_string(threshold) +
                    " not reached by the " + std::to_string(sigma.size()) +
                    " available singular values; increase the sketch rank");
}

inline Index select_rank(const VectorXd &sigma, double threshold, double total = -1.0)
{
  return select_rank(std::span<const double>(sigma.data(), static_cast<std::size_t>(sigma.size())), threshold, total);
}

inline Index select_rank(const PodBasis &spectrum, double threshold)
{
  return select_rank(spectrum.singular_values, threshold, spectrum.total_energy);
}

inline MatrixXd project(const Eigen::Ref<const MatrixXd> &V, const Eigen::Ref<const MatrixXd> &Q)
{
  if (V.rows() != Q.rows())
  {
    throw DimensionError("project: basis has " + std::to_string(V.rows()) +
                         " rows but snapshots have " + std::to_string(Q.rows()));
  }
  return V.transpose() * Q;
}

// Row sums of |V|: |q_i| <= B * factors_i whenever every |qhat_j| <= B.
inline VectorXd bound_factors(const Eigen::Ref<const MatrixXd> &V)
{
  return V.cwiseAbs().rowwise().sum();
}

}  // namespace opinf

#endif  // OPINF_POD_HPP
