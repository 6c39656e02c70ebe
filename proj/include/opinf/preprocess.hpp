#ifndef OPINF_PREPROCESS_HPP
#define OPINF_PREPROCESS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "opinf/error.hpp"

//
// Native-to-learning variable maps and zero-preserving scaling.
//
// Snapshot matrices stack state variables in contiguous blocks of n_x rows each. A
// TransformSpec maps a native layout to a learning layout channel by channel; ScalingParams
// then divides each learning variable by a single positive factor (no shift, so zeros stay
// zeros).
//
namespace opinf
{

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class VariableKind
{
  nonnegative,  // scaled to [0, 1]
  signed_       // scaled to [-1, 1]
};

struct Variable
{
  std::string name;
  VariableKind kind = VariableKind::signed_;
};

class VariableLayout
{
public:
  VariableLayout() = default;
  VariableLayout(std::vector<Variable> variables, Index cells)
    : variables_(std::move(variables)), cells_(cells)
  {
    if (cells_ < 1)
    {
      throw DimensionError("VariableLayout: cell count must be >= 1");
    }
    if (variables_.empty())
    {
      throw DimensionError("VariableLayout: at least one variable required");
    }
    for (std::size_t a = 0; a < variables_.size(); a++)
    {
      for (std::size_t b = a + 1; b < variables_.size(); b++)
      {
        if (variables_[a].name == variables_[b].name)
        {
          throw DimensionError("VariableLayout: duplicate variable '" + variables_[a].name + "'");
        }
      }
    }
  }

  // Single signed variable occupying all rows.
  static VariableLayout single(Index rows, std::string name = "q")
  {
    return VariableLayout({{std::move(name), VariableKind::signed_}}, rows);
  }

  const std::vector<Variable> &variables() const { return variables_; }
  Index num_variables() const { return static_cast<Index>(variables_.size()); }
  Index cells() const { return cells_; }
  Index rows() const { return cells_ * num_variables(); }

  std::optional<Index> find(const std::string &name) const
  {
    for (std::size_t v = 0; v < variables_.size(); v++)
    {
      if (variables_[v].name == name)
      {
        return static_cast<Index>(v);
      }
    }
    return std::nullopt;
  }

  Index index_of(const std::string &name) const
  {
    if (auto v = find(name))
    {
      return *v;
    }
    throw DomainError("unknown variable '" + name + "'");
  }

  // First row of variable v's block.
  Index offset(Index v) const { return v * cells_; }

  void check_rows(Index rows, const char *who) const
  {
    if (rows != this->rows())
    {
      throw DimensionError(std::string(who) + ": expected " + std::to_string(this->rows()) +
                           " rows (" + std::to_string(num_variables()) + " variables x " +
                           std::to_string(cells_) + " cells), got " + std::to_string(rows));
    }
  }

private:
  std::vector<Variable> variables_;
  Index cells_ = 0;
};

enum class ChannelOp
{
  identity,     // out = source
  reciprocal,   // out = 1 / source, source > 0
  scaled_ratio  // out = source / divisor
};

struct ChannelMap
{
  Variable target;
  ChannelOp op = ChannelOp::identity;
  std::string source;
  double divisor = 1.0;
};

//
// Reversible columnwise map from a native layout to a learning layout. Each learning channel
// is computed from one native variable. Several channels may read the same native variable;
// the inverse reconstructs each native variable from exactly one channel, chosen by
// `reconstruct_from` (native name -> channel name) or, absent an entry, the first channel
// that reads it.
//
class TransformSpec
{
public:
  TransformSpec() = default;
  TransformSpec(VariableLayout source, std::vector<ChannelMap> channels,
                std::vector<std::pair<std::string, std::string>> reconstruct_from = {})
    : source_(std::move(source)), channels_(std::move(channels))
  {
    std::vector<Variable> targets;
    for (const auto &ch : channels_)
    {
      source_.index_of(ch.source);
      if (ch.op == ChannelOp::scaled_ratio && !(ch.divisor != 0.0 && std::isfinite(ch.divisor)))
      {
        throw DomainError("channel '" + ch.target.name + "': divisor must be finite and nonzero");
      }
      targets.push_back(ch.target);
    }
    target_ = VariableLayout(std::move(targets), source_.cells());

    inverse_.assign(static_cast<std::size_t>(source_.num_variables()), -1);
    for (const auto &[native, channel] : reconstruct_from)
    {
      const Index v = source_.index_of(native);
      const Index c = target_.index_of(channel);
      if (channels_[static_cast<std::size_t>(c)].source != native)
      {
        throw DomainError("channel '" + channel + "' does not read native variable '" + native +
                          "'");
      }
      inverse_[static_cast<std::size_t>(v)] = c;
    }
    for (Index v = 0; v < source_.num_variables(); v++)
    {
      auto &slot = inverse_[static_cast<std::size_t>(v)];
      for (Index c = 0; slot < 0 && c < static_cast<Index>(channels_.size()); c++)
      {
        if (channels_[static_cast<std::size_t>(c)].source ==
            source_.variables()[static_cast<std::size_t>(v)].name)
        {
          slot = c;
        }
      }
      if (slot < 0)
      {
        throw DomainError("native variable '" +
                          source_.variables()[static_cast<std::size_t>(v)].name +
                          "' is not read by any channel and cannot be reconstructed");
      }
    }
  }

  static TransformSpec identity(const VariableLayout &layout)
  {
    std::vector<ChannelMap> channels;
    for (const auto &v : layout.variables())
    {
      channels.push_back({v, ChannelOp::identity, v.name, 1.0});
    }
    return TransformSpec(layout, std::move(channels));
  }

  const VariableLayout &source() const { return source_; }
  const VariableLayout &target() const { return target_; }
  const std::vector<ChannelMap> &channels() const { return channels_; }

  // Channel index used to rebuild native variable v.
  Index reconstruction_channel(Index v) const { return inverse_[static_cast<std::size_t>(v)]; }

private:
  VariableLayout source_;
  VariableLayout target_;
  std::vector<ChannelMap> channels_;
  std::vector<Index> inverse_;
};

inline MatrixXd apply_transform(const Eigen::Ref<const MatrixXd> &Z, const TransformSpec &spec)
{
  const auto &src = spec.source();
  const auto &tgt = spec.target();
  src.check_rows(Z.rows(), "apply_transform");
  const Index nx = src.cells();
  MatrixXd Q(tgt.rows(), Z.cols());
  for (Index c = 0; c < tgt.num_variables(); c++)
  {
    const auto &ch = spec.channels()[static_cast<std::size_t>(c)];
    const auto in = Z.middleRows(src.offset(src.index_of(ch.source)), nx);
    auto out = Q.middleRows(tgt.offset(c), nx);
    switch (ch.op)
    {
      case ChannelOp::identity:
        out = in;
        break;
      case ChannelOp::reciprocal:
        for (Index j = 0; j < in.cols(); j++)
        {
          for (Index i = 0; i < nx; i++)
          {
            if (!(in(i, j) > 0.0))
            {
              throw DomainError("apply_transform: reciprocal of nonpositive value " +
                                std::to_string(in(i, j)) + " in variable '" + ch.source +
                                "' at cell " + std::to_string(i) + ", column " +
                                std::to_string(j));
            }
          }
        }
        out = in.cwiseInverse();
        break;
      case ChannelOp::scaled_ratio:
        out = in / ch.divisor;
        break;
    }
  }
  return Q;
}

inline MatrixXd invert_transform(const Eigen::Ref<const MatrixXd> &Q, const TransformSpec &spec)
{
  const auto &src = spec.source();
  const auto &tgt = spec.target();
  tgt.check_rows(Q.rows(), "invert_transform");
  const Index nx = src.cells();
  MatrixXd Z(src.rows(), Q.cols());
  for (Index v = 0; v < src.num_variables(); v++)
  {
    const Index c = spec.reconstruction_channel(v);
    const auto &ch = spec.channels()[static_cast<std::size_t>(c)];
    const auto in = Q.middleRows(tgt.offset(c), nx);
    auto out = Z.middleRows(src.offset(v), nx);
    switch (ch.op)
    {
      case ChannelOp::identity:
        out = in;
        break;
      case ChannelOp::reciprocal:
        for (Index j = 0; j < in.cols(); j++)
        {
          for (Index i = 0; i < nx; i++)
          {
            if (in(i, j) == 0.0)
            {
              throw DomainError("invert_transform: reciprocal of zero in channel '" +
                                ch.target.name + "' at cell " + std::to_string(i) +
                                ", column " + std::to_string(j));
            }
          }
        }
        out = in.cwiseInverse();
        break;
      case ChannelOp::scaled_ratio:
        out = in * ch.divisor;
        break;
    }
  }
  return Z;
}

struct ScalingParams
{
  VariableLayout layout;
  std::vector<double> scales;
};

// Per-variable scale factors fit on training data: max|block| for signed variables, max(block)
// for nonnegative ones, 1 for identically zero blocks.
inline ScalingParams fit_scaling(const Eigen::Ref<const MatrixXd> &Q, const VariableLayout &layout)
{
  layout.check_rows(Q.rows(), "fit_scaling");
  ScalingParams params{layout, {}};
  for (Index v = 0; v < layout.num_variables(); v++)
  {
    const auto &var = layout.variables()[static_cast<std::size_t>(v)];
    const auto block = Q.middleRows(layout.offset(v), layout.cells());
    double scale = 0.0;
    if (var.kind == VariableKind::nonnegative)
    {
      if (block.size() > 0 && block.minCoeff() < 0.0)
      {
        throw DomainError("fit_scaling: negative entry in nonnegative variable '" + var.name +
                          "'");
      }
      scale = block.size() > 0 ? block.maxCoeff() : 0.0;
    }
    else
    {
      scale = block.size() > 0 ? block.cwiseAbs().maxCoeff() : 0.0;
    }
    if (!std::isfinite(scale))
    {
      throw DomainError("fit_scaling: non-finite data in variable '" + var.name + "'");
    }
    params.scales.push_back(scale > 0.0 ? scale : 1.0);
  }
  return params;
}

inline MatrixXd apply_scaling(const Eigen::Ref<const MatrixXd> &Q, const ScalingParams &params)
{
  params.layout.check_rows(Q.rows(), "apply_scaling");
  MatrixXd out(Q.rows(), Q.cols());
  const Index nx = params.layout.cells();
  for (Index v = 0; v < params.layout.num_variables(); v++)
  {
    out.middleRows(v * nx, nx) = Q.middleRows(v * nx, nx) / params.scales[static_cast<std::size_t>(v)];
  }
  return out;
}

inline MatrixXd invert_scaling(const Eigen::Ref<const MatrixXd> &Qs, const ScalingParams &params)
{
  params.layout.check_rows(Qs.rows(), "invert_scaling");
  MatrixXd out(Qs.rows(), Qs.cols());
  const Index nx = params.layout.cells();
  for (Index v = 0; v < params.layout.num_variables(); v++)
  {
    out.middleRows(v * nx, nx) = Qs.middleRows(v * nx, nx) * params.scales[static_cast<std::size_t>(v)];
  }
  return out;
}

// The composed map z -> scaled learning variables, and its reverse.
struct LearningMap
{
  TransformSpec transform;
  ScalingParams scaling;

  static LearningMap fit(const Eigen::Ref<const MatrixXd> &Z, TransformSpec spec)
  {
    MatrixXd Q = apply_transform(Z, spec);
    ScalingParams scaling = fit_scaling(Q, spec.target());
    return {std::move(spec), std::move(scaling)};
  }

  MatrixXd forward(const Eigen::Ref<const MatrixXd> &Z) const
  {
    return apply_scaling(apply_transform(Z, transform), scaling);
  }

  MatrixXd reverse(const Eigen::Ref<const MatrixXd> &Q) const
  {
    return invert_transform(invert_scaling(Q, scaling), transform);
  }
};

}  // namespace opinf

#endif  // OPINF_PREPROCESS_HPP
