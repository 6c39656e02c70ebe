// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "opinf/io.hpp"
#include "opinf/opinf.hpp"
#include "test_util.hpp"

using namespace opinf;
using opinf::testing::random_matrix;
using opinf::testing::random_vector;
using opinf::testing::rel_err;

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict
{
  bool pass = false;
  std::string detail;
};

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Stable quadratic ROM with oscillatory linear part, used by the recovery and search checks.
RomOperators oscillator_rom(Index r, Index m, std::uint64_t seed)
{
  auto ops = RomOperators::zeros(r, m);
  const MatrixXd S = random_matrix(r, r, seed);
  ops.A = -0.1 * MatrixXd::Identity(r, r) + (S - S.transpose());
  ops.H = 0.05 * random_matrix(r, compact_dim(r), seed + 1);
  ops.c = 0.1 * random_vector(r, seed + 2);
  ops.B = 0.5 * random_matrix(r, m, seed + 3);
  return ops;
}

// ---------------------------------------------------------------------------------------

Verdict operator_recovery()
{
  const auto start = Clock::now();
  const Index r = 6;
  const auto truth = oscillator_rom(r, 1, 11);
  const UniformTimeGrid grid{0.0, 0.05, 500};
  const auto data = generate_recovery_dataset(truth, random_vector(r, 12), pressure_forcing(1.0, 0.5, 0.37), grid);
  const auto ops = solve_lstsq(build_data_matrix(data.Qhat, data.U), data.R);
  const double elapsed = seconds_since(start);
  const double ec = rel_err(ops.c, truth.c);
  const double eA = rel_err(ops.A, truth.A);
  const double eH = rel_err(ops.H, truth.H);
  const double eB = rel_err(ops.B, truth.B);
  const double worst = std::max({ec, eA, eH, eB});
  return {worst <= 1e-8 && elapsed < 5.0, "rel errors c " + fmt(ec) + ", A " + fmt(eA) + ", H " + fmt(eH) +
                                            ", B " + fmt(eB) + " (<= 1e-8); " + fmt(elapsed) + " s (< 5 s)"};
}

// Minimizer of ||D O - R^T||^2 + ||Gamma O||^2 via QR of the stacked system [D; Gamma], returned
// as r x d like RomOperators::stacked(). Gamma carries lambda2 on the r(r+1)/2 quadratic columns.
MatrixXd augmented_oracle(const MatrixXd &D, const MatrixXd &R, Index r, const RegPair &reg)
{
  const Index k = D.rows();
  const Index d = D.cols();
  MatrixXd A = MatrixXd::Zero(k + d, d);
  A.topRows(k) = D;
  for (Index i = 0; i < d; i++)
  {
    const bool quadratic = i >= 1 + r && i < 1 + r + r * (r + 1) / 2;
    A(k + i, i) = quadratic ? reg.lambda2 : reg.lambda1;
  }
  MatrixXd rhs = MatrixXd::Zero(k + d, r);
  rhs.topRows(k) = R.transpose();
  return A.colPivHouseholderQr().solve(rhs).transpose();
}

Verdict tikhonov_equivalence()
{
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> pick_r(1, 6);
  std::uniform_real_distribution<double> log_lambda(-3.0, 3.0);
  double worst = 0.0;
  Index largest_d = 0;
  for (int trial = 0; trial < 50; trial++)
  {
    const Index r = pick_r(gen);
    const Index m = std::min<Index>(3, 30 - data_dim(r, 0));
    std::uniform_int_distribution<Index> pick_m(0, m);
    const Index mm = pick_m(gen);
    const Index k = 200;
    const MatrixXd Qhat = random_matrix(r, k, 100 + trial);
    const MatrixXd U = random_matrix(mm, k, 200 + trial);
    const MatrixXd R = random_matrix(r, k, 300 + trial);
    const RegPair reg{std::pow(10.0, log_lambda(gen)), std::pow(10.0, log_lambda(gen))};

    const auto data = build_data_matrix(Qhat, U);
    const auto ops = solve_regularized(build_gram_cache(data, R), reg);
    const MatrixXd oracle = augmented_oracle(data.D, R, r, reg);
    worst = std::max(worst, rel_err(ops.stacked(), oracle));
    largest_d = std::max(largest_d, data_dim(r, mm));
  }
  return {worst <= 1e-9, "50 instances, d <= " + std::to_string(largest_d) + ", worst rel diff " + fmt(worst) +
                           " (<= 1e-9)"};
}

Verdict dimension_formula()
{
  const std::vector<std::pair<Index, Index>> table = {{22, 277},  {27, 407},  {36, 704},  {43, 991},
                                                      {53, 1486}, {66, 2279}, {82, 3487}, {110, 6217}};
  int matches = 0;
  for (const auto &[r, d] : table)
  {
    matches += data_dim(r, 1) == d ? 1 : 0;
  }
  const Index d72 = data_dim(72, 1);
  return {matches == static_cast<int>(table.size()) && d72 == 2702,
          std::to_string(matches) + "/8 (r, d) pairs exact; r = 72 gives " + std::to_string(d72) +
            " = 1 + r + r(r+1)/2 + m (flagged: not 2701)"};
}

Verdict fd4_order()
{
  auto max_error = [](double dt) {
    const Index k = static_cast<Index>(std::lround(4.0 / dt)) + 1;
    const UniformTimeGrid grid{0.0, dt, k};
    const VectorXd t = grid.times();
    const MatrixXd q = t.array().sin().matrix().transpose();
    const MatrixXd dq = fd4(q, grid);
    return (dq.row(0).transpose() - VectorXd(t.array().cos())).cwiseAbs().maxCoeff();
  };
  const double ratio = max_error(0.05) / max_error(0.025);

  // Quartic with derivative bounded away from zero so per-column relative error is meaningful.
  const UniformTimeGrid grid{1.0, 0.01, 101};
  const VectorXd t = grid.times();
  const MatrixXd q = (t.array().pow(4) - 2.0 * t.array().cube() + 3.0 * t.array().square() + t.array())
                       .matrix()
                       .transpose();
  const VectorXd exact = 4.0 * t.array().cube() - 6.0 * t.array().square() + 6.0 * t.array() + 1.0;
  const VectorXd dq = fd4(q, grid).row(0).transpose();
  const double quartic = ((dq - exact).array().abs() / exact.array().abs()).maxCoeff();
  return {ratio >= 12.0 && ratio <= 20.0 && quartic <= 1e-9,
          "error ratio on halving dt " + fmt(ratio) + " (in [12, 20]); quartic worst column rel error " +
            fmt(quartic) + " (<= 1e-9)"};
}

// ---- Burgers desk experiment shared by the bound and end-to-end checks ------------------

struct BurgersExperiment
{
  MatrixXd truth;  // all 1000 snapshots
  UniformTimeGrid train_grid;
  double tf = 0.0;
  InputSignal signal;
  RegOpInfInputs inputs;
  RegOpInfOptions options;
  RegOpInfResult result;
  Trajectory rom;
  double elapsed = 0.0;
};

const BurgersExperiment &burgers()
{
  static const BurgersExperiment ex = [] {
    BurgersExperiment e;
    const auto start = Clock::now();
    const UniformTimeGrid full{0.0, 0.002, 1000};
    e.signal = pressure_forcing(1.0, 0.1, 2.0);
    e.truth = forced_burgers_run(256, 0.01, 1.0, e.signal, full).trajectory.states;
    e.train_grid = {full.t0, full.dt, 600};
    e.tf = full.last();
    e.inputs.snapshots = e.truth.leftCols(600);
    e.inputs.grid = e.train_grid;
    e.inputs.final_time = e.tf;
    e.inputs.signal = e.signal;
    e.inputs.transform = TransformSpec::identity(VariableLayout::single(256));
    e.options.energy_threshold = 0.985;
    e.result = reg_opinf(e.inputs, e.options);
    e.rom = integrate(e.result.operators, e.result.projected.col(0), e.signal,
                      TrainingProblem::output_times(e.train_grid, e.tf), e.options.search.integration,
                      e.result.bound);
    e.elapsed = seconds_since(start);
    return e;
  }();
  return ex;
}

Verdict bound_holds()
{
  const auto &ex = burgers();
  const MatrixXd &V = ex.result.basis.V;
  const VectorXd limit = ex.result.bound * bound_factors(V);
  const MatrixXd X = V * ex.rom.states;
  Index violations = 0;
  for (Index j = 0; j < X.cols(); j++)
  {
    violations += (X.col(j).cwiseAbs().array() > limit.array()).count();
  }
  const bool complete = ex.rom.status.ok() && ex.rom.times.size() == 1000;
  return {complete && violations == 0, std::to_string(X.cols()) + " output times, " + std::to_string(X.size()) +
                                         " entries checked, " + std::to_string(violations) +
                                         " violations; status " + to_string(ex.rom.status.kind)};
}

// ---- Algorithm behavior -----------------------------------------------------------------

struct SearchCase
{
  TrainingProblem problem;
  SearchConfig config;
};

SearchCase stable_search_case(std::uint64_t seed)
{
  const Index r = 4;
  const auto truth = oscillator_rom(r, 1, seed);
  const auto signal = pressure_forcing(1.0, 0.5, 0.2);
  const UniformTimeGrid grid{0.0, 0.05, 200};
  const auto data = generate_recovery_dataset(truth, random_vector(r, seed + 9), signal, grid);
  // Finite differences make the fit inexact, so regularization has something to trade off.
  const MatrixXd R = fd4(data.Qhat, grid);
  SearchConfig cfg;
  cfg.lambda1 = {-6.0, 2.0, 5};
  cfg.lambda2 = {-6.0, 2.0, 5};
  const double bound = select_bound(data.Qhat, cfg.tau);
  return {TrainingProblem(build_gram_cache(data.Qhat, data.U, R), data.Qhat, signal, grid, 15.0, bound), cfg};
}

Verdict algorithm_behavior()
{
  std::vector<std::string> notes;
  bool ok = true;

  // Unstable regime: derivative data planted from a growing linear system.
  {
    const Index r = 3;
    const auto stable = oscillator_rom(r, 0, 31);
    const UniformTimeGrid grid{0.0, 0.05, 101};
    const auto data = generate_recovery_dataset(stable, random_vector(r, 32), InputSignal::none(), grid);
    MatrixXd R = 1.5 * data.Qhat;
    const auto cache = build_gram_cache(data.Qhat, R);
    const double bound = select_bound(data.Qhat, 1.5);
    const double err = train_error({1e-6, 1e-6}, cache, data.Qhat, InputSignal::none(), grid, 15.0, bound);
    const bool inf = std::isinf(err) && err > 0;
    ok = ok && inf;
    notes.push_back(std::string("planted unstable regime -> ") + (inf ? "inf" : fmt(err)));
  }

  // Refinement never loses to the grid winner.
  {
    int not_worse = 0;
    int total = 0;
    for (std::uint64_t seed : {41u, 51u, 61u})
    {
      const auto sc = stable_search_case(seed);
      const auto report = search_regularization(sc.problem, sc.config);
      not_worse += report.winner.error <= report.grid_winner.error ? 1 : 0;
      total++;
    }
    const auto &burgers_report = burgers().result.report;
    not_worse += burgers_report.winner.error <= burgers_report.grid_winner.error ? 1 : 0;
    total++;
    ok = ok && not_worse == total;
    notes.push_back("refined <= grid winner in " + std::to_string(not_worse) + "/" + std::to_string(total));
  }

  // Fixed-seed reruns, including a parallel grid search and the randomized SVD path.
  {
    const auto &ex = burgers();
    auto opts = ex.options;
    opts.search.threads = 4;
    const auto again = reg_opinf(ex.inputs, opts);
    const bool same_ops =
      io::encode_matrix(again.operators.stacked()) == io::encode_matrix(ex.result.operators.stacked()) &&
      io::encode_matrix(again.basis.V) == io::encode_matrix(ex.result.basis.V);

    const MatrixXd big = random_matrix(800, 30, 71) * random_matrix(30, 600, 72) + 1e-3 * random_matrix(800, 600, 73);
    RsvdOptions rs;
    rs.seed = 99;
    const bool same_rsvd = io::encode_matrix(pod(big, 25, rs).V) == io::encode_matrix(pod(big, 25, rs).V);
    ok = ok && same_ops && same_rsvd;
    notes.push_back(std::string("reruns ") + (same_ops ? "bit-identical" : "DIFFER") + ", rSVD reruns " +
                    (same_rsvd ? "bit-identical" : "DIFFER"));
  }

  std::string detail;
  for (std::size_t i = 0; i < notes.size(); i++)
  {
    detail += (i ? "; " : "") + notes[i];
  }
  return {ok, detail};
}

// ---- Scalability ------------------------------------------------------------------------

Verdict scalability()
{
  const Index r = 43;
  const Index k = 20000;
  const RegPair reg{1e-2, 1e1};
  auto make = [&](Index cols, std::uint64_t seed) {
    return std::tuple{random_matrix(r, cols, seed), random_matrix(1, cols, seed + 1), random_matrix(r, cols, seed + 2)};
  };

  const auto [Q1, U1, R1] = make(k, 1);
  const auto start = Clock::now();
  const auto cache1 = build_gram_cache(Q1, U1, R1);
  const auto ops = solve_regularized(cache1, reg);
  const double first = seconds_since(start);

  const auto [Q2, U2, R2] = make(2 * k, 11);
  const auto cache2 = build_gram_cache(Q2, U2, R2);

  // Alternate the two solves so drift on a shared machine hits both equally.
  double best1 = std::numeric_limits<double>::infinity();
  double best2 = best1;
  for (int rep = 0; rep < 7; rep++)
  {
    auto t = Clock::now();
    const auto a = solve_regularized(cache1, reg);
    best1 = std::min(best1, seconds_since(t));
    t = Clock::now();
    const auto b = solve_regularized(cache2, reg);
    best2 = std::min(best2, seconds_since(t));
    if (!a.stacked().allFinite() || !b.stacked().allFinite())
    {
      return {false, "non-finite solve"};
    }
  }
  const double change = std::abs(best2 - best1) / best1;
  return {first <= 10.0 && change < 0.10 && ops.stacked().allFinite(),
          "d = " + std::to_string(cache1.d()) + ": Gram + solve " + fmt(first) + " s (<= 10 s); solve " +
            fmt(best1) + " s at k, " + fmt(best2) + " s at 2k, change " + fmt(100.0 * change) + "% (< 10%)"};
}

// ---- End-to-end ---------------------------------------------------------------------------

Verdict end_to_end()
{
  const auto &ex = burgers();
  const MatrixXd &V = ex.result.basis.V;
  const auto &map = ex.result.map;
  const Index k = ex.train_grid.k;
  const MatrixXd Z = ex.truth.leftCols(k);
  const MatrixXd Q = map.forward(Z);
  const MatrixXd projected = map.reverse(V * project(V, Q));
  const MatrixXd predicted = map.reverse(V * ex.rom.states.leftCols(k));
  const double proj_err = (Z - projected).norm() / Z.norm();
  const double pred_err = (Z - predicted).norm() / Z.norm();
  const bool feasible = ex.rom.status.ok() && ex.rom.times.size() == ex.truth.cols();
  const Index r = ex.result.basis.rank();
  return {pred_err <= 5.0 * proj_err && feasible && ex.elapsed < 120.0,
          "r = " + std::to_string(r) + " (energy " +
            fmt(cumulative_energy(ex.result.basis.singular_values, r, ex.result.basis.total_energy)) +
            "), training-window prediction error " + fmt(pred_err) + " vs projection error " + fmt(proj_err) +
            " (ratio " + fmt(pred_err / proj_err) + " <= 5); prediction window " +
            (feasible ? "bound-feasible" : "NOT feasible") + "; " + fmt(ex.elapsed) + " s (< 120 s)"};
}

// ---- Preprocessing -------------------------------------------------------------------------

Verdict preprocessing()
{
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; seed++)
  {
    const auto layout = VariableLayout({{"rho", VariableKind::nonnegative},
                                        {"u", VariableKind::signed_},
                                        {"Y", VariableKind::nonnegative}},
                                       40);
    MatrixXd Z(120, 60);
    Z.topRows(40) = random_matrix(40, 60, seed, 0.5, 2.0);
    Z.middleRows(40, 40) = random_matrix(40, 60, seed + 100, -300.0, 300.0);
    Z.bottomRows(40) = random_matrix(40, 60, seed + 200, 0.0, 1e-3);
    const TransformSpec spec(layout, {{{"xi", VariableKind::nonnegative}, ChannelOp::reciprocal, "rho"},
                                      {{"u", VariableKind::signed_}, ChannelOp::identity, "u"},
                                      {{"c", VariableKind::nonnegative}, ChannelOp::scaled_ratio, "Y", 16.04}});
    const auto map = LearningMap::fit(Z, spec);
    worst = std::max(worst, rel_err(map.reverse(map.forward(Z)), Z));
    const MatrixXd T = apply_transform(Z, spec);
    worst = std::max(worst, rel_err(invert_scaling(apply_scaling(T, map.scaling), map.scaling), T));
  }

  // Identically-zero block through scale -> project -> reconstruct, on the dense and randomized paths.
  bool zeros_kept = true;
  for (const auto &[cells, cols] : {std::pair<Index, Index>{50, 80}, std::pair<Index, Index>{300, 550}})
  {
    const auto layout =
      VariableLayout({{"c", VariableKind::nonnegative}, {"T", VariableKind::nonnegative}}, cells);
    MatrixXd Z(2 * cells, cols);
    Z.topRows(cells).setZero();
    Z.bottomRows(cells) = random_matrix(cells, 6, cells, 0.0, 1.0) * random_matrix(6, cols, cols, 0.0, 1.0) +
                          1e-2 * random_matrix(cells, cols, 7, 0.0, 1.0);
    const auto map = LearningMap::fit(Z, TransformSpec::identity(layout));
    const MatrixXd Q = map.forward(Z);
    const auto basis = pod(Q, 5);
    const MatrixXd recon = map.reverse(basis.V * project(basis.V, Q));
    zeros_kept = zeros_kept && (recon.topRows(cells).array() == 0.0).all();
  }
  return {worst <= 1e-12 && zeros_kept, "worst round-trip rel error " + fmt(worst) + " (<= 1e-12); zero block " +
                                          (zeros_kept ? "exactly zero" : "NOT zero") +
                                          " after reconstruction (dense and randomized bases)"};
}

}  // namespace

int main()
{
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
    {"operator recovery from exact derivatives", operator_recovery},
    {"normal equations match augmented least squares", tikhonov_equivalence},
    {"data dimension table", dimension_formula},
    {"fourth-order finite differences", fd4_order},
    {"reconstructed states respect the trajectory bound", bound_holds},
    {"regularization search behavior", algorithm_behavior},
    {"Gram-cached solve scalability", scalability},
    {"Burgers end-to-end experiment", end_to_end},
    {"preprocessing round trips and zero preservation", preprocessing},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); i++)
  {
    Verdict v;
    try
    {
      v = criteria[i].second();
    }
    catch (const std::exception &e)
    {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::printf("[%s] criterion %zu: %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
