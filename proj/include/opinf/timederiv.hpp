#ifndef OPINF_TIMEDERIV_HPP
#define OPINF_TIMEDERIV_HPP

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "opinf/error.hpp"

namespace opinf
{

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct UniformTimeGrid
{
  double t0 = 0.0;
  double dt = 1.0;
  Index k = 0;

  double time(Index j) const { return t0 + static_cast<double>(j) * dt; }
  double last() const { return time(k - 1); }

  VectorXd times() const
  {
    VectorXd t(k);
    for (Index j = 0; j < k; j++)
    {
      t(j) = time(j);
    }
    return t;
  }

  // Recovers the grid from sampled times; rejects nonuniform spacing.
  static UniformTimeGrid from_times(const Eigen::Ref<const VectorXd> &t, double rel_tol = 1e-9)
  {
    if (t.size() < 2)
    {
      throw DimensionError("UniformTimeGrid: need at least two samples");
    }
    const double dt = (t(t.size() - 1) - t(0)) / static_cast<double>(t.size() - 1);
    if (!(dt > 0.0))
    {
      throw DomainError("UniformTimeGrid: times must be increasing");
    }
    for (Index j = 1; j < t.size(); j++)
    {
      if (std::abs((t(j) - t(j - 1)) - dt) > rel_tol * dt)
      {
        throw DomainError("UniformTimeGrid: nonuniform spacing at sample " + std::to_string(j));
      }
    }
    return {t(0), dt, t.size()};
  }
};

// Fourth-order finite-difference time derivative of each row of X. Interior columns use the
// centered five-point stencil; the two columns at each end use one-sided five-point stencils
// of the same order, so the output keeps all k columns.
inline MatrixXd fd4(const Eigen::Ref<const MatrixXd> &X, const UniformTimeGrid &grid)
{
  const Index k = X.cols();
  if (grid.k != k)
  {
    throw DimensionError("fd4: grid has " + std::to_string(grid.k) + " samples but data has " +
                         std::to_string(k) + " columns");
  }
  if (k < 5)
  {
    throw DimensionError("fd4: at least 5 samples required, got " + std::to_string(k));
  }
  if (!(grid.dt > 0.0))
  {
    throw DomainError("fd4: time step must be positive");
  }
  const double s = 1.0 / (12.0 * grid.dt);
  MatrixXd D(X.rows(), k);
  auto c = [&](Index j) { return X.col(j); };

  D.col(0) = s * (-25.0 * c(0) + 48.0 * c(1) - 36.0 * c(2) + 16.0 * c(3) - 3.0 * c(4));
  D.col(1) = s * (-3.0 * c(0) - 10.0 * c(1) + 18.0 * c(2) - 6.0 * c(3) + c(4));
  for (Index j = 2; j < k - 2; j++)
  {
    D.col(j) = s * (c(j - 2) - 8.0 * c(j - 1) + 8.0 * c(j + 1) - c(j + 2));
  }
  D.col(k - 2) = s * (-c(k - 5) + 6.0 * c(k - 4) - 18.0 * c(k - 3) + 10.0 * c(k - 2) + 3.0 * c(k - 1));
  D.col(k - 1) =
    s * (3.0 * c(k - 5) - 16.0 * c(k - 4) + 36.0 * c(k - 3) - 48.0 * c(k - 2) + 25.0 * c(k - 1));
  return D;
}

inline MatrixXd fd4(const Eigen::Ref<const MatrixXd> &X, const Eigen::Ref<const VectorXd> &times)
{
  return fd4(X, UniformTimeGrid::from_times(times));
}

}  // namespace opinf

#endif  // OPINF_TIMEDERIV_HPP
