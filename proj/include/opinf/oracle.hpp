#ifndef OPINF_ORACLE_HPP
#define OPINF_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "opinf/error.hpp"
#include "opinf/ode.hpp"
#include "opinf/pod.hpp"
#include "opinf/preprocess.hpp"
#include "opinf/quadform.hpp"
#include "opinf/rom.hpp"
#include "opinf/solver.hpp"
#include "opinf/timederiv.hpp"

//
// Ground truth for verification: full-order quadratic models with known operators, their
// intrusive Galerkin ROMs, a viscous Burgers testbed, exact-derivative datasets, and the
// spatially averaged relative error metrics.
//
namespace opinf
{

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

//
// dq/dt = c + A q + H (q ⊗ q) + B u with H stored sparsely against the full Kronecker
// product (column a*n + b holds the coefficient of q_a q_b).
//
struct FomOperators
{
  VectorXd c;
  SparseMatrix A;
  SparseMatrix H;
  MatrixXd B;

  Index n() const { return c.size(); }
  Index m() const { return B.cols(); }

  void check() const
  {
    const Index nn = n();
    if (A.rows() != nn || A.cols() != nn || H.rows() != nn || H.cols() != nn * nn ||
        B.rows() != nn)
    {
      throw DimensionError("FomOperators: inconsistent shapes for n = " + std::to_string(nn));
    }
  }
};

inline VectorXd fom_rhs(const FomOperators &fom, const Eigen::Ref<const VectorXd> &q,
                        const Eigen::Ref<const VectorXd> &u)
{
  const Index n = fom.n();
  VectorXd out = fom.c + fom.A * q;
  for (Index col = 0; col < fom.H.outerSize(); col++)
  {
    const double qq = q(col / n) * q(col % n);
    for (SparseMatrix::InnerIterator it(fom.H, col); it; ++it)
    {
      out(it.row()) += it.value() * qq;
    }
  }
  if (fom.m() > 0)
  {
    out += fom.B * u;
  }
  return out;
}

// Intrusive ROM: c_r = V^T c, A_r = V^T A V, H_r = V^T H (V ⊗ V) in compact form, B_r = V^T B.
inline RomOperators galerkin_project(const FomOperators &fom, const Eigen::Ref<const MatrixXd> &V)
{
  fom.check();
  const Index n = fom.n();
  if (V.rows() != n)
  {
    throw DimensionError("galerkin_project: basis has " + std::to_string(V.rows()) +
                         " rows, model has n = " + std::to_string(n));
  }
  const Index r = V.cols();
  RomOperators ops;
  ops.c = V.transpose() * fom.c;
  ops.A = V.transpose() * (fom.A * V);
  ops.B = V.transpose() * fom.B;

  MatrixXd H_full = MatrixXd::Zero(r, r * r);
  for (Index col = 0; col < fom.H.outerSize(); col++)
  {
    const Index a = col / n;
    const Index b = col % n;
    for (SparseMatrix::InnerIterator it(fom.H, col); it; ++it)
    {
      const VectorXd w = it.value() * V.row(it.row()).transpose();
      for (Index p = 0; p < r; p++)
      {
        for (Index s = 0; s < r; s++)
        {
          H_full.col(p * r + s) += (V(a, p) * V(b, s)) * w;
        }
      }
    }
  }
  ops.H = compact_from_full(H_full);
  return ops;
}

inline RomOperators galerkin_project(const FomOperators &fom, const PodBasis &basis)
{
  return galerkin_project(fom, basis.V);
}

enum class Boundary
{
  periodic,
  dirichlet
};

struct BurgersModel
{
  FomOperators fom;
  VectorXd x;  // node coordinates
  double dx = 0.0;
};

//
// Semi-discrete viscous Burgers q_t + (q^2/2)_x = nu q_xx on n nodes.
//
// The convective term uses the skew-symmetric central discretization
//   -[(q_{i+1}^2 - q_{i-1}^2) + q_i (q_{i+1} - q_{i-1})] / (6 dx),
// which conserves the discrete energy sum q_i^2 on a periodic grid. Diffusion is the standard
// second difference. The periodic model has no input (m = 0). The Dirichlet model has nodes
// x_i = (i + 1) dx on (0, L), a zero right boundary, and a left boundary value u(t) that
// enters through the viscous flux only (ghost value zero in the convective term), so the
// input stays linear: m = 1, B = nu / dx^2 e_0.
//
inline BurgersModel make_burgers_fom(Index n, double viscosity, double length,
                                     Boundary boundary = Boundary::periodic)
{
  if (n < 8)
  {
    throw DimensionError("make_burgers_fom: need at least 8 grid points, got " + std::to_string(n));
  }
  if (!(viscosity > 0.0) || !(length > 0.0))
  {
    throw DomainError("make_burgers_fom: viscosity and domain length must be positive");
  }
  BurgersModel model;
  const bool periodic = boundary == Boundary::periodic;
  model.dx = periodic ? length / static_cast<double>(n) : length / static_cast<double>(n + 1);
  model.x.resize(n);
  for (Index i = 0; i < n; i++)
  {
    model.x(i) = periodic ? static_cast<double>(i) * model.dx : static_cast<double>(i + 1) * model.dx;
  }

  auto wrap = [&](Index i) -> Index {
    if (periodic)
    {
      return (i + n) % n;
    }
    return (i < 0 || i >= n) ? -1 : i;
  };

  const double diff = viscosity / (model.dx * model.dx);
  const double conv = 1.0 / (6.0 * model.dx);
  std::vector<Eigen::Triplet<double>> a_trip;
  std::vector<Eigen::Triplet<double>> h_trip;
  for (Index i = 0; i < n; i++)
  {
    const Index left = wrap(i - 1);
    const Index right = wrap(i + 1);
    a_trip.emplace_back(i, i, -2.0 * diff);
    if (left >= 0)
    {
      a_trip.emplace_back(i, left, diff);
      h_trip.emplace_back(i, left * n + left, conv);
      h_trip.emplace_back(i, i * n + left, conv);
    }
    if (right >= 0)
    {
      a_trip.emplace_back(i, right, diff);
      h_trip.emplace_back(i, right * n + right, -conv);
      h_trip.emplace_back(i, i * n + right, -conv);
    }
  }
  model.fom.c = VectorXd::Zero(n);
  model.fom.A.resize(n, n);
  model.fom.A.setFromTriplets(a_trip.begin(), a_trip.end());
  model.fom.H.resize(n, n * n);
  model.fom.H.setFromTriplets(h_trip.begin(), h_trip.end());
  model.fom.B = MatrixXd::Zero(n, periodic ? 0 : 1);
  if (!periodic)
  {
    model.fom.B(0, 0) = diff;
  }
  return model;
}

// Integrates a full-order model and returns the trajectory (no bound).
inline Trajectory integrate_fom(const FomOperators &fom, const Eigen::Ref<const VectorXd> &q0,
                                const InputSignal &signal, const Eigen::Ref<const VectorXd> &t_eval,
                                const OdeOptions &opts = {})
{
  fom.check();
  if (signal.dim() != fom.m())
  {
    throw DimensionError("integrate_fom: input signal dimension does not match the model");
  }
  struct Term
  {
    Index row, a, b;
    double value;
  };
  std::vector<Term> terms;
  const Index n = fom.n();
  for (Index col = 0; col < fom.H.outerSize(); col++)
  {
    for (SparseMatrix::InnerIterator it(fom.H, col); it; ++it)
    {
      terms.push_back({it.row(), col / n, col % n, it.value()});
    }
  }
  VectorXd u(fom.m());
  auto rhs = [&](double t, const VectorXd &q, VectorXd &out) {
    signal.evaluate(t, u);
    out = fom.c;
    out.noalias() += fom.A * q;
    for (const auto &term : terms)
    {
      out(term.row) += term.value * q(term.a) * q(term.b);
    }
    if (fom.m() > 0)
    {
      out.noalias() += fom.B * u;
    }
  };
  return integrate_ode(rhs, q0, t_eval, opts);
}

struct ForcedBurgersRun
{
  BurgersModel model;
  Trajectory trajectory;
};

// Dirichlet Burgers driven through its left boundary, starting from a profile that matches the
// boundary value there and falls to zero at the right wall.
inline ForcedBurgersRun forced_burgers_run(Index n, double viscosity, double length,
                                           const InputSignal &signal, const UniformTimeGrid &grid,
                                           const OdeOptions &opts = {1e-8, 1e-10})
{
  ForcedBurgersRun run{make_burgers_fom(n, viscosity, length, Boundary::dirichlet), {}};
  if (signal.dim() != 1)
  {
    throw DimensionError("forced_burgers_run: boundary forcing must be scalar");
  }
  const double left = signal(grid.t0)(0);
  VectorXd q0(n);
  for (Index i = 0; i < n; i++)
  {
    const double s = run.model.x(i) / length;
    q0(i) = left * (1.0 - s) + 0.5 * left * std::sin(std::numbers::pi * s);
  }
  run.trajectory = integrate_fom(run.model.fom, q0, signal, grid.times(), opts);
  if (!run.trajectory.status.ok())
  {
    throw Error("forced_burgers_run: integration failed at t = " + std::to_string(run.trajectory.status.t) +
                " (" + run.trajectory.status.reason + ")");
  }
  return run;
}

struct RecoveryDataset
{
  MatrixXd Qhat;  // r x k states on the grid
  MatrixXd R;     // r x k exact right-hand sides at those states
  MatrixXd U;     // m x k input samples
};

// Samples the trajectory of a known ROM and pairs every state with its exact time derivative.
inline RecoveryDataset generate_recovery_dataset(const RomOperators &rom_true,
                                                 const Eigen::Ref<const VectorXd> &qhat0,
                                                 const InputSignal &signal,
                                                 const UniformTimeGrid &grid,
                                                 const OdeOptions &opts = {1e-12, 1e-14})
{
  const auto traj = integrate(rom_true, qhat0, signal, grid.times(), opts);
  if (!traj.status.ok())
  {
    throw Error("generate_recovery_dataset: integration failed at t = " +
                std::to_string(traj.status.t) + " (" + traj.status.reason + ")");
  }
  RecoveryDataset out{traj.states, MatrixXd(rom_true.r(), grid.k), signal.sample(grid.times())};
  for (Index j = 0; j < grid.k; j++)
  {
    out.R.col(j) = rom_rhs(rom_true, out.Qhat.col(j), out.U.col(j));
  }
  return out;
}

namespace detail
{

// Mean over cells of |approx - truth| / max(|truth|, floor) for one native variable block.
inline VectorXd relative_error_series(const Eigen::Ref<const MatrixXd> &truth,
                                      const Eigen::Ref<const MatrixXd> &approx,
                                      const VariableLayout &layout, const std::string &variable)
{
  const Index v = layout.index_of(variable);
  const Index nx = layout.cells();
  const auto s = truth.middleRows(layout.offset(v), nx);
  const auto a = approx.middleRows(layout.offset(v), nx);
  const double peak = s.size() > 0 ? s.cwiseAbs().maxCoeff() : 0.0;
  const double floor = std::max(1e-10 * peak, std::numeric_limits<double>::min());
  VectorXd out(truth.cols());
  for (Index j = 0; j < truth.cols(); j++)
  {
    double acc = 0.0;
    for (Index i = 0; i < nx; i++)
    {
      acc += std::abs(a(i, j) - s(i, j)) / std::max(std::abs(s(i, j)), floor);
    }
    out(j) = acc / static_cast<double>(nx);
  }
  return out;
}

}  // namespace detail

// s_projerr(t): error of reverse(V V^T forward(z(t))) against z(t) for one native variable.
inline VectorXd projection_error_series(const Eigen::Ref<const MatrixXd> &Z, const LearningMap &map,
                                        const Eigen::Ref<const MatrixXd> &V,
                                        const std::string &variable)
{
  const MatrixXd Q = map.forward(Z);
  const MatrixXd recon = map.reverse(V * (V.transpose() * Q));
  return detail::relative_error_series(Z, recon, map.transform.source(), variable);
}

// s_prederr(t): error of reverse(V qtilde(t)) against z(t); Qtilde columns align with Z's.
inline VectorXd prediction_error_series(const Eigen::Ref<const MatrixXd> &Z,
                                        const Eigen::Ref<const MatrixXd> &Qtilde,
                                        const LearningMap &map, const Eigen::Ref<const MatrixXd> &V,
                                        const std::string &variable)
{
  if (Qtilde.cols() != Z.cols() || Qtilde.rows() != V.cols())
  {
    throw DimensionError("prediction_error_series: ROM trajectory must be r x (snapshot count)");
  }
  const MatrixXd recon = map.reverse(V * Qtilde);
  return detail::relative_error_series(Z, recon, map.transform.source(), variable);
}

}  // namespace opinf

#endif  // OPINF_ORACLE_HPP
