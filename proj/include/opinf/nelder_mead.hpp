#ifndef OPINF_NELDER_MEAD_HPP
#define OPINF_NELDER_MEAD_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "opinf/error.hpp"

namespace opinf
{

using Eigen::Index;
using Eigen::VectorXd;

struct NelderMeadOptions
{
  // Edge length of the initial right-angled simplex.
  double initial_step = 1.0;
  int max_iterations = 200;
  int max_evaluations = 400;
  // Stop when every vertex lies within xtol of the best (max norm) and values within ftol.
  double xtol = 1e-4;
  double ftol = 1e-10;
};

struct NelderMeadResult
{
  VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

//
// Downhill simplex minimization with standard coefficients (reflection 1, expansion 2,
// contraction 1/2, shrink 1/2). +inf is a legal objective value and ranks below every finite
// value, so disqualified points push the simplex away. The starting point is a vertex of the
// initial simplex and the best vertex never gets worse, so the result is never worse than x0.
//
template <typename Objective>
NelderMeadResult nelder_mead(Objective &&objective, const Eigen::Ref<const VectorXd> &x0,
                             const NelderMeadOptions &opts = {})
{
  const Index n = x0.size();
  if (n < 1)
  {
    throw DimensionError("nelder_mead: empty starting point");
  }
  NelderMeadResult result;
  auto eval = [&](const VectorXd &x) {
    result.evaluations++;
    const double v = objective(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<VectorXd> pts(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> vals(static_cast<std::size_t>(n + 1));
  for (Index i = 0; i < n; i++)
  {
    pts[static_cast<std::size_t>(i + 1)](i) += opts.initial_step;
  }
  for (std::size_t i = 0; i < pts.size(); i++)
  {
    vals[i] = eval(pts[i]);
  }

  std::vector<std::size_t> order(pts.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    // Stable: earlier vertices win ties, keeping the start point preferred at equal value.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<VectorXd> p2;
    std::vector<double> v2;
    for (auto i : order)
    {
      p2.push_back(pts[i]);
      v2.push_back(vals[i]);
    }
    pts = std::move(p2);
    vals = std::move(v2);
  };

  auto converged = [&] {
    double dx = 0.0;
    for (std::size_t i = 1; i < pts.size(); i++)
    {
      dx = std::max(dx, (pts[i] - pts[0]).cwiseAbs().maxCoeff());
    }
    const double df = vals.back() - vals.front();
    return dx <= opts.xtol && df <= opts.ftol;
  };

  const std::size_t worst = pts.size() - 1;
  for (result.iterations = 0; result.iterations < opts.max_iterations; result.iterations++)
  {
    sort_simplex();
    if (converged())
    {
      result.converged = true;
      break;
    }
    if (result.evaluations >= opts.max_evaluations)
    {
      break;
    }

    VectorXd centroid = VectorXd::Zero(n);
    for (std::size_t i = 0; i < worst; i++)
    {
      centroid += pts[i];
    }
    centroid /= static_cast<double>(n);

    const VectorXd xr = centroid + (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr < vals[0])
    {
      const VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = eval(xe);
      if (fe < fr)
      {
        pts[worst] = xe;
        vals[worst] = fe;
      }
      else
      {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[worst - 1])
    {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    if (fr < vals[worst])
    {
      const VectorXd xc = centroid + 0.5 * (xr - centroid);
      const double fc = eval(xc);
      if (fc <= fr)
      {
        pts[worst] = xc;
        vals[worst] = fc;
        continue;
      }
    }
    else
    {
      const VectorXd xcc = centroid + 0.5 * (pts[worst] - centroid);
      const double fcc = eval(xcc);
      if (fcc < vals[worst])
      {
        pts[worst] = xcc;
        vals[worst] = fcc;
        continue;
      }
    }
    for (std::size_t i = 1; i < pts.size(); i++)
    {
      pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
      vals[i] = eval(pts[i]);
    }
  }
  sort_simplex();
  result.x = pts[0];
  result.value = vals[0];
  return result;
}

}  // namespace opinf

#endif  // OPINF_NELDER_MEAD_HPP
