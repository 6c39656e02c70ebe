#ifndef OPINF_ODE_HPP
#define OPINF_ODE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "opinf/error.hpp"

//
// Explicit adaptive Runge-Kutta integration with the Dormand-Prince 5(4) pair ("RK45"),
// PI step-size control, and the standard quartic continuous extension for output at
// arbitrary times. Integration never throws for numerical trouble; the outcome is recorded
// in the returned status so callers can treat failures as data.
//
namespace opinf
{

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct OdeOptions
{
  double rtol = 1e-6;
  double atol = 1e-9;
  double max_step = std::numeric_limits<double>::infinity();
  // 0 selects the initial step automatically.
  double first_step = 0.0;
  long max_steps = 1000000;
};

struct IntegrationStatus
{
  enum class Kind
  {
    completed,
    bound_violated,
    integrator_failed
  };

  Kind kind = Kind::completed;
  double t = 0.0;    // time of the event (violation or failure)
  Index index = -1;  // state component that violated the bound
  std::string reason;

  bool ok() const { return kind == Kind::completed; }
};

inline std::string to_string(IntegrationStatus::Kind kind)
{
  switch (kind)
  {
    case IntegrationStatus::Kind::completed:
      return "completed";
    case IntegrationStatus::Kind::bound_violated:
      return "bound_violated";
    case IntegrationStatus::Kind::integrator_failed:
      return "integrator_failed";
  }
  return "unknown";
}

struct Trajectory
{
  VectorXd times;   // output times actually reached
  MatrixXd states;  // one column per output time
  IntegrationStatus status;
  long steps = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
};

namespace dopri5
{

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
// Fifth-order weights (also row 7 of the tableau, first-same-as-last).
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between fifth- and fourth-order weights.
inline constexpr double e1 = -71.0 / 57600, e3 = 71.0 / 16695, e4 = -71.0 / 1920,
                        e5 = 17253.0 / 339200, e6 = -22.0 / 525, e7 = 1.0 / 40;

// Continuous extension: y(t + theta h) = y + h * sum_s k_s * sum_p P[s][p] theta^(p+1).
inline constexpr double P[7][4] = {
  {1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432},
  {0.0, 0.0, 0.0, 0.0},
  {0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799},
  {0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072},
  {0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408,
   701980252875.0 / 199316789632},
  {0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844},
  {0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423}};

}  // namespace dopri5

namespace detail
{

inline double rms_norm(const VectorXd &err, const VectorXd &y0, const VectorXd &y1,
                       const OdeOptions &opts)
{
  const Index n = err.size();
  if (n == 0)
  {
    return 0.0;
  }
  double acc = 0.0;
  for (Index i = 0; i < n; i++)
  {
    const double sc = opts.atol + opts.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    const double v = err(i) / sc;
    acc += v * v;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

// Returns the index of the first component with |y_i| > bound, or -1.
inline Index bound_violation(const VectorXd &y, double bound)
{
  for (Index i = 0; i < y.size(); i++)
  {
    if (!(std::abs(y(i)) <= bound))
    {
      return i;
    }
  }
  return -1;
}

}  // namespace detail

//
// Integrates y' = f(t, y) from t_eval(0) to t_eval(end) and returns the solution at every
// entry of t_eval. `rhs(t, y, dydt)` writes into dydt. If `bound` is given, integration stops
// with status bound_violated as soon as any |y_i| exceeds it at an accepted step or an output
// time; non-finite states and step-size underflow stop with integrator_failed. Output columns
// reached before the stop are kept.
//
template <typename Rhs>
Trajectory integrate_ode(Rhs &&rhs, const Eigen::Ref<const VectorXd> &y0,
                         const Eigen::Ref<const VectorXd> &t_eval, const OdeOptions &opts = {},
                         std::optional<double> bound = std::nullopt)
{
  using namespace dopri5;
  using Kind = IntegrationStatus::Kind;

  const Index n = y0.size();
  const Index nout = t_eval.size();
  if (nout < 1)
  {
    throw DimensionError("integrate_ode: t_eval is empty");
  }
  for (Index j = 1; j < nout; j++)
  {
    if (!(t_eval(j) > t_eval(j - 1)))
    {
      throw DomainError("integrate_ode: t_eval must be strictly increasing");
    }
  }
  if (!(opts.rtol > 0.0) || !(opts.atol >= 0.0))
  {
    throw DomainError("integrate_ode: tolerances must satisfy rtol > 0, atol >= 0");
  }

  Trajectory traj;
  traj.times.resize(nout);
  traj.states.resize(n, nout);
  Index written = 0;

  auto finish = [&](Kind kind, double t, Index index, std::string reason) {
    traj.status = {kind, t, index, std::move(reason)};
    traj.times.conservativeResize(written);
    traj.states.conservativeResize(n, written);
    return traj;
  };

  const double t0 = t_eval(0);
  const double tf = t_eval(nout - 1);
  VectorXd y = y0;

  if (!y.allFinite())
  {
    return finish(Kind::integrator_failed, t0, -1, "non-finite initial state");
  }
  if (bound)
  {
    if (Index i = detail::bound_violation(y, *bound); i >= 0)
    {
      return finish(Kind::bound_violated, t0, i, "initial state exceeds bound");
    }
  }
  traj.times(0) = t0;
  traj.states.col(0) = y;
  written = 1;
  if (nout == 1)
  {
    return finish(Kind::completed, t0, -1, {});
  }

  VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  auto f = [&](double t, const VectorXd &yy, VectorXd &out) {
    rhs(t, yy, out);
    traj.rhs_evaluations++;
  };
  f(t0, y, k1);

  const double span = tf - t0;
  double h = opts.first_step;
  if (!(h > 0.0))
  {
    // Automatic initial step (Hairer, Norsett & Wanner, II.4).
    const double d0 = detail::rms_norm(y, y, y, opts);
    const double d1 = detail::rms_norm(k1, y, y, opts);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    ytmp = y + h0 * k1;
    f(t0 + h0, ytmp, k2);
    const double d2 = detail::rms_norm(VectorXd(k2 - k1), y, y, opts) / h0;
    const double h1 = (std::max(d1, d2) <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                  : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
    h = std::min(100.0 * h0, h1);
  }
  h = std::min({h, opts.max_step, span});

  // PI controller constants.
  constexpr double safety = 0.9;
  constexpr double beta = 0.04;
  constexpr double expo = 0.2 - 0.75 * beta;
  constexpr double fac_min = 0.2;  // largest allowed shrink is 1/5
  constexpr double fac_max = 10.0;
  double err_old = 1e-4;
  bool last_rejected = false;

  double t = t0;
  while (t < tf)
  {
    if (traj.steps + traj.rejected >= opts.max_steps)
    {
      return finish(Kind::integrator_failed, t, -1, "maximum number of steps exceeded");
    }
    const double h_min = 10.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < h_min)
    {
      return finish(Kind::integrator_failed, t, -1, "step size underflow");
    }
    if (t + h > tf || tf - (t + h) < h_min)
    {
      h = tf - t;
    }

    ytmp = y + h * (a21 * k1);
    f(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double t_new = (h == tf - t) ? tf : t + h;
    f(t_new, ynew, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = detail::rms_norm(err, y, ynew, opts);

    if (!std::isfinite(en) || !ynew.allFinite())
    {
      // Retried with smaller steps until the step size underflows.
      h *= fac_min;
      traj.rejected++;
      last_rejected = true;
      continue;
    }

    if (en > 1.0)
    {
      const double fac = std::max(fac_min, safety * std::pow(en, -expo));
      h *= fac;
      traj.rejected++;
      last_rejected = true;
      continue;
    }

    // Accepted: emit dense output for every t_eval in (t, t_new].
    traj.steps++;
    bool stop = false;
    Index stop_index = -1;
    double stop_time = t_new;
    while (written < nout && t_eval(written) <= t_new)
    {
      const double te = t_eval(written);
      VectorXd yo;
      if (te == t_new)
      {
        yo = ynew;
      }
      else
      {
        const double theta = (te - t) / h;
        double w[7];
        for (int s = 0; s < 7; s++)
        {
          w[s] = theta * (P[s][0] + theta * (P[s][1] + theta * (P[s][2] + theta * P[s][3])));
        }
        yo = y + h * (w[0] * k1 + w[2] * k3 + w[3] * k4 + w[4] * k5 + w[5] * k6 + w[6] * k7);
      }
      if (bound)
      {
        if (Index i = detail::bound_violation(yo, *bound); i >= 0)
        {
          stop = true;
          stop_index = i;
          stop_time = te;
          break;
        }
      }
      traj.times(written) = te;
      traj.states.col(written) = yo;
      written++;
    }
    if (!stop && bound)
    {
      if (Index i = detail::bound_violation(ynew, *bound); i >= 0)
      {
        stop = true;
        stop_index = i;
        stop_time = t_new;
      }
    }
    if (stop)
    {
      return finish(Kind::bound_violated, stop_time, stop_index, "state exceeds bound");
    }

    t = t_new;
    y = ynew;
    k1 = k7;

    double fac = safety * std::pow(en, -expo) * std::pow(err_old, beta);
    if (en == 0.0)
    {
      fac = fac_max;
    }
    fac = std::clamp(fac, fac_min, fac_max);
    if (last_rejected)
    {
      fac = std::min(fac, 1.0);
    }
    h = std::min(h * fac, opts.max_step);
    err_old = std::max(en, 1e-4);
    last_rejected = false;
  }

  return finish(Kind::completed, tf, -1, {});
}

}  // namespace opinf

#endif  // OPINF_ODE_HPP
