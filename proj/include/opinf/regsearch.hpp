#ifndef OPINF_REGSEARCH_HPP
#define OPINF_REGSEARCH_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "opinf/error.hpp"
#include "opinf/nelder_mead.hpp"
#include "opinf/ode.hpp"
#include "opinf/pod.hpp"
#include "opinf/preprocess.hpp"
#include "opinf/quadform.hpp"
#include "opinf/rom.hpp"
#include "opinf/solver.hpp"
#include "opinf/timederiv.hpp"

//
// Regularization selection for Operator Inference.
//
// Each candidate (lambda1, lambda2) is scored by solving the regularized regression, integrating
// the resulting ROM over the full time horizon [t0, tf], and comparing with the projected
// training data. Candidates whose reduced state leaves the box |qhat_i| <= B anywhere on
// [t0, tf], or whose integration fails, score +inf. A coarse log-spaced grid supplies a start
// point that Nelder-Mead refines in log10 coordinates.
//
namespace opinf
{

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kDisqualified = std::numeric_limits<double>::infinity();

struct GridAxis
{
  double log10_min = 0.0;
  double log10_max = 5.0;
  int count = 6;

  std::vector<double> values() const
  {
    if (count < 2)
    {
      throw ConfigError("grid axis needs at least 2 points, got " + std::to_string(count));
    }
    if (!(log10_max > log10_min))
    {
      throw ConfigError("grid axis range must satisfy log10_max > log10_min");
    }
    std::vector<double> out;
    for (int i = 0; i < count; i++)
    {
      const double e = log10_min + (log10_max - log10_min) * i / (count - 1);
      out.push_back(std::pow(10.0, e));
    }
    return out;
  }
};

enum class ErrorNorm
{
  // sqrt(int ||qhat - qtilde||^2 dt) / sqrt(int ||qhat||^2 dt), trapezoidal rule on the
  // training samples.
  relative_l2
};

struct SearchConfig
{
  double tau = 1.5;
  GridAxis lambda1;
  GridAxis lambda2;
  NelderMeadOptions nm{0.5, 100, 200, 1e-3, 1e-10};
  ErrorNorm error_norm = ErrorNorm::relative_l2;
  OdeOptions integration;
  int threads = 1;

  void validate() const
  {
    if (!(tau >= 1.0))
    {
      throw ConfigError("bound margin tau must be >= 1, got " + std::to_string(tau));
    }
    lambda1.values();
    lambda2.values();
  }
};

enum class Outcome
{
  finite,
  bound_violated,
  integrator_failed,
  solve_failed
};

inline std::string to_string(Outcome o)
{
  switch (o)
  {
    case Outcome::finite:
      return "finite";
    case Outcome::bound_violated:
      return "bound_violated";
    case Outcome::integrator_failed:
      return "integrator_failed";
    case Outcome::solve_failed:
      return "solve_failed";
  }
  return "unknown";
}

enum class Stage
{
  grid,
  refine
};

struct Evaluation
{
  RegPair reg;
  double error = kDisqualified;
  Outcome outcome = Outcome::finite;
  Stage stage = Stage::grid;
};

// B = tau * max |Qhat_ij|.
inline double select_bound(const Eigen::Ref<const MatrixXd> &Qhat, double tau)
{
  if (!(tau >= 1.0))
  {
    throw DomainError("select_bound: tau must be >= 1, got " + std::to_string(tau));
  }
  const double peak = Qhat.size() > 0 ? Qhat.cwiseAbs().maxCoeff() : 0.0;
  if (!(peak > 0.0))
  {
    throw DomainError("select_bound: projected training data is identically zero");
  }
  return tau * peak;
}

// Relative discrete L2([t0, t_{k-1}]) distance between two r x k trajectories sampled on a
// uniform grid; trapezoidal weights, so the spacing cancels.
inline double relative_l2_error(const Eigen::Ref<const MatrixXd> &reference,
                                const Eigen::Ref<const MatrixXd> &approx)
{
  const Index k = reference.cols();
  double num = 0.0;
  double den = 0.0;
  for (Index j = 0; j < k; j++)
  {
    const double w = (j == 0 || j == k - 1) ? 0.5 : 1.0;
    num += w * (reference.col(j) - approx.col(j)).squaredNorm();
    den += w * reference.col(j).squaredNorm();
  }
  if (!(den > 0.0))
  {
    throw DomainError("relative_l2_error: reference trajectory is identically zero");
  }
  return std::sqrt(num / den);
}

//
// Everything TrainError needs, frozen: the Gram cache of the projected data, the training
// trajectory, the input signal, the time horizon and the bound. evaluate() is a pure function
// of the regularization pair and may be called concurrently.
//
class TrainingProblem
{
public:
  TrainingProblem(GramCache cache, MatrixXd Qhat, InputSignal signal, UniformTimeGrid grid,
                  double final_time, double bound, OdeOptions integration = {})
    : cache_(std::move(cache)), Qhat_(std::move(Qhat)), signal_(std::move(signal)), grid_(grid),
      final_time_(final_time), bound_(bound), integration_(integration)
  {
    if (Qhat_.rows() != cache_.r || Qhat_.cols() != grid_.k)
    {
      throw DimensionError("TrainingProblem: projected data must be r x k matching the cache "
                           "and the time grid");
    }
    if (signal_.dim() != cache_.m)
    {
      throw DimensionError("TrainingProblem: input signal dimension " +
                           std::to_string(signal_.dim()) + " != m = " + std::to_string(cache_.m));
    }
    if (final_time_ < grid_.last())
    {
      throw DomainError("TrainingProblem: final time precedes the last training time");
    }
    if (!(bound_ > 0.0))
    {
      throw DomainError("TrainingProblem: bound must be positive");
    }
    times_ = output_times(grid_, final_time_);
  }

  // Training times followed by the continuation of the grid up to tf (tf itself included).
  static VectorXd output_times(const UniformTimeGrid &grid, double tf)
  {
    std::vector<double> t;
    for (Index j = 0; j < grid.k; j++)
    {
      t.push_back(grid.time(j));
    }
    const double eps = 1e-9 * grid.dt;
    for (Index j = grid.k;; j++)
    {
      const double tj = grid.time(j);
      if (tj > tf - eps)
      {
        break;
      }
      t.push_back(tj);
    }
    if (tf > t.back() + eps)
    {
      t.push_back(tf);
    }
    return Eigen::Map<VectorXd>(t.data(), static_cast<Index>(t.size()));
  }

  const GramCache &cache() const { return cache_; }
  const MatrixXd &projected() const { return Qhat_; }
  const InputSignal &signal() const { return signal_; }
  const UniformTimeGrid &grid() const { return grid_; }
  double final_time() const { return final_time_; }
  double bound() const { return bound_; }
  const VectorXd &times() const { return times_; }
  const OdeOptions &integration() const { return integration_; }

  // Integrates a ROM from the first training column over [t0, tf], enforcing the bound.
  Trajectory simulate(const RomOperators &ops) const
  {
    return integrate(ops, Qhat_.col(0), signal_, times_, integration_, bound_);
  }

  Evaluation evaluate(const RegPair &reg, Stage stage = Stage::grid) const
  {
    Evaluation ev{reg, kDisqualified, Outcome::finite, stage};
    RomOperators ops;
    try
    {
      ops = solve_regularized(cache_, reg);
    }
    catch (const FactorizationError &)
    {
      ev.outcome = Outcome::solve_failed;
      return ev;
    }
    if (!ops.stacked().allFinite())
    {
      ev.outcome = Outcome::solve_failed;
      return ev;
    }
    const Trajectory traj = simulate(ops);
    switch (traj.status.kind)
    {
      case IntegrationStatus::Kind::bound_violated:
        ev.outcome = Outcome::bound_violated;
        return ev;
      case IntegrationStatus::Kind::integrator_failed:
        ev.outcome = Outcome::integrator_failed;
        return ev;
      case IntegrationStatus::Kind::completed:
        break;
    }
    ev.error = relative_l2_error(Qhat_, traj.states.leftCols(grid_.k));
    return ev;
  }

  double train_error(const RegPair &reg) const { return evaluate(reg).error; }

private:
  GramCache cache_;
  MatrixXd Qhat_;
  InputSignal signal_;
  UniformTimeGrid grid_;
  double final_time_;
  double bound_;
  OdeOptions integration_;
  VectorXd times_;
};

inline double train_error(const RegPair &reg, const GramCache &cache,
                          const Eigen::Ref<const MatrixXd> &Qhat, const InputSignal &signal,
                          const UniformTimeGrid &grid, double tf, double bound,
                          const OdeOptions &tol = {})
{
  return TrainingProblem(cache, Qhat, signal, grid, tf, bound, tol).train_error(reg);
}

// True when a should be preferred over b: lower error, ties toward larger (lambda1, lambda2).
inline bool better(const Evaluation &a, const Evaluation &b)
{
  if (a.error != b.error)
  {
    return a.error < b.error;
  }
  if (a.reg.lambda1 != b.reg.lambda1)
  {
    return a.reg.lambda1 > b.reg.lambda1;
  }
  return a.reg.lambda2 > b.reg.lambda2;
}

struct GridSearchResult
{
  Evaluation winner;
  std::vector<Evaluation> evaluations;  // lambda1-major order
};

// Objective abstraction so the search can run against surrogates in tests.
template <typename Evaluator>
GridSearchResult grid_search(Evaluator &&evaluate, const SearchConfig &config)
{
  const auto l1 = config.lambda1.values();
  const auto l2 = config.lambda2.values();
  std::vector<RegPair> points;
  for (double a : l1)
  {
    for (double b : l2)
    {
      points.push_back({a, b});
    }
  }
  GridSearchResult result;
  result.evaluations.resize(points.size());
  const auto nthreads =
    static_cast<std::size_t>(std::clamp<int>(config.threads, 1, static_cast<int>(points.size())));
  if (nthreads == 1)
  {
    for (std::size_t i = 0; i < points.size(); i++)
    {
      result.evaluations[i] = evaluate(points[i], Stage::grid);
    }
  }
  else
  {
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < nthreads; w++)
    {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < points.size(); i += nthreads)
        {
          result.evaluations[i] = evaluate(points[i], Stage::grid);
        }
      });
    }
    for (auto &t : workers)
    {
      t.join();
    }
  }

  const Evaluation *best = nullptr;
  for (const auto &ev : result.evaluations)
  {
    if (std::isfinite(ev.error) && (best == nullptr || better(ev, *best)))
    {
      best = &ev;
    }
  }
  if (best == nullptr)
  {
    throw SearchError("grid search: every candidate regularization was disqualified (" +
                      std::to_string(points.size()) +
                      " points); widen the lambda ranges toward larger values or increase tau");
  }
  result.winner = *best;
  return result;
}

inline GridSearchResult grid_search(const TrainingProblem &problem, const SearchConfig &config)
{
  return grid_search([&](const RegPair &reg, Stage s) { return problem.evaluate(reg, s); }, config);
}

struct RefineResult
{
  Evaluation best;
  std::vector<Evaluation> evaluations;
  int iterations = 0;
};

// Nelder-Mead over (log10 lambda1, log10 lambda2) from a start with finite error.
template <typename Evaluator>
RefineResult refine_nelder_mead(Evaluator &&evaluate, const Evaluation &start,
                                const NelderMeadOptions &opts)
{
  RefineResult result;
  result.best = start;
  result.best.stage = Stage::refine;
  if (!std::isfinite(start.error))
  {
    throw SearchError("refine_nelder_mead: start point has no finite training error");
  }
  auto objective = [&](const VectorXd &x) {
    const RegPair reg{std::pow(10.0, x(0)), std::pow(10.0, x(1))};
    Evaluation ev = evaluate(reg, Stage::refine);
    result.evaluations.push_back(ev);
    if (std::isfinite(ev.error) && better(ev, result.best))
    {
      result.best = ev;
    }
    return ev.error;
  };
  VectorXd x0(2);
  x0 << std::log10(start.reg.lambda1), std::log10(start.reg.lambda2);
  result.iterations = nelder_mead(objective, x0, opts).iterations;
  return result;
}

inline RefineResult refine_nelder_mead(const TrainingProblem &problem, const Evaluation &start,
                                       const NelderMeadOptions &opts)
{
  return refine_nelder_mead([&](const RegPair &reg, Stage s) { return problem.evaluate(reg, s); },
                            start, opts);
}

struct SearchReport
{
  std::vector<Evaluation> evaluations;
  Evaluation grid_winner;
  Evaluation winner;
  double bound = 0.0;
  Index r = 0;
  Index m = 0;
  Index k = 0;

  long count(Outcome o) const
  {
    return static_cast<long>(std::count_if(evaluations.begin(), evaluations.end(),
                                           [o](const Evaluation &e) { return e.outcome == o; }));
  }
};

inline SearchReport search_regularization(const TrainingProblem &problem, const SearchConfig &config)
{
  config.validate();
  auto grid = grid_search(problem, config);
  auto refined = refine_nelder_mead(problem, grid.winner, config.nm);
  SearchReport report;
  report.evaluations = std::move(grid.evaluations);
  report.evaluations.insert(report.evaluations.end(), refined.evaluations.begin(),
                            refined.evaluations.end());
  report.grid_winner = grid.winner;
  report.winner = refined.best;
  report.bound = problem.bound();
  report.r = problem.cache().r;
  report.m = problem.cache().m;
  report.k = problem.cache().k;
  return report;
}

inline std::string format_number(double v)
{
  if (std::isinf(v))
  {
    return "inf";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10e", v);
  return buf;
}

// Human-readable report: summary, configuration, then one row per evaluation.
inline std::string format_report(const SearchReport &report, const SearchConfig &config)
{
  std::ostringstream os;
  os << "# regularization search\n";
  os << "r = " << report.r << "\nm = " << report.m << "\nk = " << report.k
     << "\nd = " << data_dim(report.r, report.m) << "\n";
  os << "tau = " << format_number(config.tau) << "\nbound = " << format_number(report.bound) << "\n";
  os << "grid_lambda1 = 10^[" << config.lambda1.log10_min << ", " << config.lambda1.log10_max
     << "] x " << config.lambda1.count << "\n";
  os << "grid_lambda2 = 10^[" << config.lambda2.log10_min << ", " << config.lambda2.log10_max
     << "] x " << config.lambda2.count << "\n";
  os << "nm_initial_step = " << config.nm.initial_step << "\nnm_max_iterations = "
     << config.nm.max_iterations << "\nnm_xtol = " << config.nm.xtol << "\nnm_ftol = "
     << config.nm.ftol << "\n";
  os << "error_norm = relative_l2\n";
  os << "grid_winner = " << format_number(report.grid_winner.reg.lambda1) << " "
     << format_number(report.grid_winner.reg.lambda2) << " "
     << format_number(report.grid_winner.error) << "\n";
  os << "winner = " << format_number(report.winner.reg.lambda1) << " "
     << format_number(report.winner.reg.lambda2) << " " << format_number(report.winner.error)
     << "\n";
  os << "evaluations = " << report.evaluations.size() << "\n";
  os << "bound_violated = " << report.count(Outcome::bound_violated) << "\n";
  os << "integrator_failed = " << report.count(Outcome::integrator_failed) << "\n";
  os << "solve_failed = " << report.count(Outcome::solve_failed) << "\n";
  os << "#\n# stage lambda1 lambda2 error outcome\n";
  for (const auto &ev : report.evaluations)
  {
    os << (ev.stage == Stage::grid ? "grid  " : "refine") << " " << format_number(ev.reg.lambda1)
       << " " << format_number(ev.reg.lambda2) << " " << format_number(ev.error) << " "
       << to_string(ev.outcome) << "\n";
  }
  return os.str();
}

struct RegOpInfInputs
{
  MatrixXd snapshots;  // native variables, one column per training time
  MatrixXd inputs;     // m x k samples of u; empty rows means "sample `signal` on the grid"
  UniformTimeGrid grid;
  double final_time = 0.0;
  InputSignal signal;
  TransformSpec transform;
  // Time derivatives of the learning variables (before scaling), bypassing finite differences.
  std::optional<MatrixXd> learning_derivatives;
};

struct RegOpInfOptions
{
  // Reduced dimension; 0 selects the smallest r whose cumulative energy exceeds the threshold.
  Index rank = 0;
  double energy_threshold = 0.985;
  SearchConfig search;
  RsvdOptions rsvd;
};

struct RegOpInfResult
{
  RomOperators operators;
  PodBasis basis;
  LearningMap map;
  SearchReport report;
  MatrixXd projected;  // Qhat
  MatrixXd derivatives;  // R
  double bound = 0.0;
};

//
// Full pipeline: transform, scale, POD, project, differentiate, bound, search, final solve.
//
inline RegOpInfResult reg_opinf(const RegOpInfInputs &in, const RegOpInfOptions &opts)
{
  opts.search.validate();
  const Index k = in.snapshots.cols();
  if (in.grid.k != k)
  {
    throw DimensionError("reg_opinf: grid has " + std::to_string(in.grid.k) +
                         " samples but snapshots have " + std::to_string(k) + " columns");
  }
  MatrixXd U = in.inputs;
  if (U.rows() == 0 && in.signal.dim() > 0)
  {
    U = in.signal.sample(in.grid.times());
  }
  if (U.rows() != in.signal.dim())
  {
    throw DimensionError("reg_opinf: input data has " + std::to_string(U.rows()) +
                         " rows but the input signal has dimension " +
                         std::to_string(in.signal.dim()));
  }
  if (U.rows() > 0 && U.cols() != k)
  {
    throw DimensionError("reg_opinf: input data must have one column per snapshot");
  }
  const Index m = U.rows();

  RegOpInfResult out;
  out.map = LearningMap::fit(in.snapshots, in.transform);
  const MatrixXd Q = out.map.forward(in.snapshots);

  Index r = opts.rank;
  if (r == 0)
  {
    const auto spectrum = singular_spectrum(Q, std::min(Q.rows(), Q.cols()), opts.rsvd);
    r = select_rank(spectrum, opts.energy_threshold);
  }
  if (data_dim(r, m) >= k)
  {
    throw OverParameterizedError("reg_opinf: d(r, m) = " + std::to_string(data_dim(r, m)) +
                                 " >= k = " + std::to_string(k) +
                                 "; the regression is not overdetermined (reduce r or add "
                                 "snapshots)");
  }

  out.basis = pod(Q, r, opts.rsvd);
  out.projected = project(out.basis.V, Q);
  if (in.learning_derivatives)
  {
    out.derivatives =
      project(out.basis.V, apply_scaling(*in.learning_derivatives, out.map.scaling));
  }
  else
  {
    out.derivatives = fd4(out.projected, in.grid);
  }
  out.bound = select_bound(out.projected, opts.search.tau);

  TrainingProblem problem(build_gram_cache(out.projected, U, out.derivatives), out.projected,
                          in.signal, in.grid, in.final_time, out.bound, opts.search.integration);
  out.report = search_regularization(problem, opts.search);
  out.operators = solve_regularized(problem.cache(), out.report.winner.reg);
  return out;
}

}  // namespace opinf

#endif  // OPINF_REGSEARCH_HPP
