#ifndef OPINF_ROM_HPP
#define OPINF_ROM_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "opinf/error.hpp"
#include "opinf/ode.hpp"
#include "opinf/quadform.hpp"
#include "opinf/solver.hpp"

namespace opinf
{

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

//
// Time-dependent input u(t). Sampled signals interpolate linearly between samples and hold
// the end values outside the sampled range.
//
class InputSignal
{
public:
  struct None
  {
  };

  struct Sampled
  {
    VectorXd times;
    MatrixXd values;  // m x times.size()
  };

  // u(t) = p_ref * (1 + amplitude * sin(2 pi f t))
  struct PressureForcing
  {
    double p_ref = 1e6;
    double amplitude = 0.1;
    double frequency = 5000.0;
  };

  InputSignal() = default;

  static InputSignal none() { return InputSignal(); }

  static InputSignal sampled(VectorXd times, MatrixXd values)
  {
    if (times.size() < 1 || values.cols() != times.size())
    {
      throw DimensionError("InputSignal::sampled: need one value column per sample time");
    }
    for (Index j = 1; j < times.size(); j++)
    {
      if (!(times(j) > times(j - 1)))
      {
        throw DomainError("InputSignal::sampled: sample times must be strictly increasing");
      }
    }
    InputSignal s;
    s.impl_ = Sampled{std::move(times), std::move(values)};
    return s;
  }

  static InputSignal pressure_forcing(double p_ref, double amplitude, double frequency)
  {
    if (!(p_ref > 0.0) || !(frequency > 0.0))
    {
      throw DomainError("pressure_forcing: reference value and frequency must be positive");
    }
    InputSignal s;
    s.impl_ = PressureForcing{p_ref, amplitude, frequency};
    return s;
  }

  Index dim() const
  {
    if (std::holds_alternative<Sampled>(impl_))
    {
      return std::get<Sampled>(impl_).values.rows();
    }
    return std::holds_alternative<PressureForcing>(impl_) ? 1 : 0;
  }

  void evaluate(double t, Eigen::Ref<VectorXd> out) const
  {
    if (const auto *p = std::get_if<PressureForcing>(&impl_))
    {
      out(0) = p->p_ref * (1.0 + p->amplitude * std::sin(2.0 * std::numbers::pi * p->frequency * t));
    }
    else if (const auto *s = std::get_if<Sampled>(&impl_))
    {
      const auto &ts = s->times;
      const Index last = ts.size() - 1;
      if (t <= ts(0))
      {
        out = s->values.col(0);
        return;
      }
      if (t >= ts(last))
      {
        out = s->values.col(last);
        return;
      }
      const auto *it = std::upper_bound(ts.data(), ts.data() + ts.size(), t);
      const Index j = static_cast<Index>(it - ts.data());
      const double w = (t - ts(j - 1)) / (ts(j) - ts(j - 1));
      out = (1.0 - w) * s->values.col(j - 1) + w * s->values.col(j);
    }
  }

  VectorXd operator()(double t) const
  {
    VectorXd u(dim());
    evaluate(t, u);
    return u;
  }

  // m x times.size() matrix of samples.
  MatrixXd sample(const Eigen::Ref<const VectorXd> &times) const
  {
    MatrixXd U(dim(), times.size());
    for (Index j = 0; j < times.size(); j++)
    {
      U.col(j) = (*this)(times(j));
    }
    return U;
  }

  const auto &variant() const { return impl_; }

private:
  std::variant<None, Sampled, PressureForcing> impl_;
};

inline InputSignal pressure_forcing(double p_ref, double amplitude, double frequency)
{
  return InputSignal::pressure_forcing(p_ref, amplitude, frequency);
}

// dq/dt = c + A q + H kron_compact(q) + B u, written into out. O(r^3) per call.
inline void rom_rhs_into(const RomOperators &ops, const Eigen::Ref<const VectorXd> &q,
                         const Eigen::Ref<const VectorXd> &u, VectorXd &kron, Eigen::Ref<VectorXd> out)
{
  kron_compact_into(q, kron);
  out.noalias() = ops.A * q;
  out += ops.c;
  out.noalias() += ops.H * kron;
  if (ops.m() > 0)
  {
    out.noalias() += ops.B * u;
  }
}

inline VectorXd rom_rhs(const RomOperators &ops, const Eigen::Ref<const VectorXd> &q,
                        const Eigen::Ref<const VectorXd> &u)
{
  if (q.size() != ops.r() || u.size() != ops.m())
  {
    throw DimensionError("rom_rhs: state/input sizes (" + std::to_string(q.size()) + ", " +
                         std::to_string(u.size()) + ") do not match operators (r = " +
                         std::to_string(ops.r()) + ", m = " + std::to_string(ops.m()) + ")");
  }
  VectorXd kron(compact_dim(ops.r()));
  VectorXd out(ops.r());
  rom_rhs_into(ops, q, u, kron, out);
  return out;
}

inline VectorXd rom_rhs(const RomOperators &ops, const Eigen::Ref<const VectorXd> &q)
{
  return rom_rhs(ops, q, VectorXd(0));
}

// Integrates the quadratic ROM from qhat0 at t_eval(0) and reports the state at each t_eval.
inline Trajectory integrate(const RomOperators &ops, const Eigen::Ref<const VectorXd> &qhat0,
                            const InputSignal &signal, const Eigen::Ref<const VectorXd> &t_eval,
                            const OdeOptions &opts = {}, std::optional<double> bound = std::nullopt)
{
  ops.check();
  if (qhat0.size() != ops.r())
  {
    throw DimensionError("integrate: initial condition has size " + std::to_string(qhat0.size()) +
                         ", operators have r = " + std::to_string(ops.r()));
  }
  if (signal.dim() != ops.m())
  {
    throw DimensionError("integrate: input signal has dimension " + std::to_string(signal.dim()) +
                         ", operators expect m = " + std::to_string(ops.m()));
  }
  VectorXd kron(compact_dim(ops.r()));
  VectorXd u(ops.m());
  auto rhs = [&](double t, const VectorXd &q, VectorXd &out) {
    signal.evaluate(t, u);
    rom_rhs_into(ops, q, u, kron, out);
  };
  return integrate_ode(rhs, qhat0, t_eval, opts, bound);
}

}  // namespace opinf

#endif  // OPINF_ROM_HPP
