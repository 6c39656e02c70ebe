#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "opinf/config.hpp"
#include "opinf/io.hpp"
#include "opinf/opinf.hpp"

namespace fs = std::filesystem;
using namespace opinf;

namespace
{

constexpr int kExitFailure = 1;
constexpr int kExitMissingFile = 2;
constexpr int kExitOverParameterized = 3;

class MissingFileError : public IoError
{
public:
  using IoError::IoError;
};

struct Common
{
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
};

struct Context
{
  RunConfig cfg;
  fs::path base;  // relative data paths resolve against the config file's directory
  fs::path out;
};

void configure_logging()
{
  auto logger = spdlog::stderr_color_mt("opinf");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char *env = std::getenv("OPINF_LOG"))
  {
    const std::string level = env;
    if (level == "error")
    {
      spdlog::set_level(spdlog::level::err);
    }
    else if (level == "debug")
    {
      spdlog::set_level(spdlog::level::debug);
    }
    else if (level != "info")
    {
      spdlog::warn("OPINF_LOG='{}' not one of error, info, debug; using info", level);
    }
  }
}

fs::path require_file(const fs::path &path)
{
  if (!fs::is_regular_file(path))
  {
    throw MissingFileError("file not found: '" + path.string() + "'");
  }
  return path;
}

Context make_context(const Common &common)
{
  Context ctx;
  if (!common.config_path.empty())
  {
    ctx.cfg = RunConfig::load(require_file(common.config_path));
    ctx.base = fs::path(common.config_path).parent_path();
  }
  if (common.seed)
  {
    ctx.cfg.set("seed", std::to_string(*common.seed));
  }
  if (common.threads)
  {
    ctx.cfg.set("threads", std::to_string(*common.threads));
  }
  if (!common.out.empty())
  {
    ctx.cfg.set("output_dir", common.out);
    ctx.out = common.out;
  }
  else
  {
    const fs::path o = ctx.cfg.str("output_dir");
    ctx.out = o.is_absolute() ? o : ctx.base / o;
  }
  fs::create_directories(ctx.out);
  return ctx;
}

fs::path resolve(const Context &ctx, const std::string &value)
{
  const fs::path p = value;
  return p.is_absolute() || ctx.base.empty() ? p : ctx.base / p;
}

// Path from an explicit flag, else from a config key; empty if neither is set.
fs::path data_path(const Context &ctx, const std::string &flag, const std::string &key)
{
  if (!flag.empty())
  {
    return flag;
  }
  const auto &v = ctx.cfg.str(key);
  return v.empty() ? fs::path() : resolve(ctx, v);
}

MatrixXd load(const fs::path &path)
{
  spdlog::debug("reading {}", path.string());
  return io::load_matrix(require_file(path));
}

void save(const fs::path &path, const MatrixXd &M)
{
  spdlog::debug("writing {} ({} x {})", path.string(), M.rows(), M.cols());
  io::write_matrix(path, M);
}

void save_text(const fs::path &path, const std::string &text)
{
  std::ofstream out(path, std::ios::trunc);
  if (!out)
  {
    throw IoError("cannot write '" + path.string() + "'");
  }
  out << text;
}

std::string fmt_real(double v)
{
  return format_number(v);
}

// Key/value sidecar files ("key = value" lines).
std::map<std::string, std::string> read_meta(const fs::path &path)
{
  const auto bytes = io::read_bytes(require_file(path));
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line))
  {
    const auto eq = line.find('=');
    if (eq != std::string::npos && line[0] != '#')
    {
      out[RunConfig::trim(line.substr(0, eq))] = RunConfig::trim(line.substr(eq + 1));
    }
  }
  return out;
}

double meta_real(const std::map<std::string, std::string> &meta, const std::string &key)
{
  auto it = meta.find(key);
  if (it == meta.end())
  {
    throw IoError("metadata is missing '" + key + "'");
  }
  return std::stod(it->second);
}

struct Snapshots
{
  MatrixXd Z;         // native snapshots, training columns only
  MatrixXd all;       // every column in the file
  UniformTimeGrid grid;
  double final_time = 0.0;
};

Snapshots load_snapshots(const Context &ctx, const std::string &flag)
{
  const auto path = data_path(ctx, flag, "snapshots");
  if (path.empty())
  {
    throw ConfigError("no snapshot file: set 'snapshots' in the config or pass --snapshots");
  }
  Snapshots s;
  s.all = load(path);
  Index k = ctx.cfg.integer("k");
  if (k == 0)
  {
    k = s.all.cols();
  }
  if (k < 1 || k > s.all.cols())
  {
    throw ConfigError("k = " + std::to_string(k) + " outside [1, " + std::to_string(s.all.cols()) +
                      "] snapshot columns");
  }
  s.Z = s.all.leftCols(k);
  s.grid = {ctx.cfg.real("t0"), ctx.cfg.real("dt"), k};
  const double tf = ctx.cfg.real("tf");
  s.final_time = tf == 0.0 ? s.grid.last() : tf;
  spdlog::info("snapshots: {} x {} ({} training columns)", s.all.rows(), s.all.cols(), k);
  return s;
}

// Input samples (m x columns) when the config names an inputs file; m = 0 otherwise.
MatrixXd load_inputs(const Context &ctx, const std::string &flag, Index columns)
{
  const auto path = data_path(ctx, flag, "inputs");
  if (path.empty())
  {
    return MatrixXd(0, columns);
  }
  MatrixXd U = load(path);
  if (U.cols() < columns)
  {
    throw DimensionError("inputs file has " + std::to_string(U.cols()) + " columns, need " +
                         std::to_string(columns));
  }
  return U;
}

InputSignal make_signal(const Context &ctx, const MatrixXd &U_all)
{
  const VectorXd times = UniformTimeGrid{ctx.cfg.real("t0"), ctx.cfg.real("dt"), U_all.cols()}.times();
  return ctx.cfg.signal(times, U_all);
}

LearningMap load_map(const Context &ctx, Index native_rows, const fs::path &scales_path)
{
  const auto layout = ctx.cfg.layout(native_rows);
  LearningMap map{ctx.cfg.transform(layout), {}};
  const MatrixXd scales = load(scales_path);
  if (scales.size() != map.transform.target().num_variables())
  {
    throw DimensionError("scale file has " + std::to_string(scales.size()) + " entries, transform has " +
                         std::to_string(map.transform.target().num_variables()) + " channels");
  }
  map.scaling.layout = map.transform.target();
  map.scaling.scales.assign(scales.data(), scales.data() + scales.size());
  return map;
}

MatrixXd scales_row(const ScalingParams &p)
{
  return Eigen::Map<const MatrixXd>(p.scales.data(), 1, static_cast<Index>(p.scales.size()));
}

void write_series(const fs::path &path, const VectorXd &times, const VectorXd &values,
                  const std::string &header)
{
  std::ostringstream os;
  os << "# time " << header << "\n";
  for (Index j = 0; j < values.size(); j++)
  {
    os << fmt_real(times(j)) << " " << fmt_real(values(j)) << "\n";
  }
  save_text(path, os.str());
}

// ---- subcommands ----------------------------------------------------------------------

int cmd_make_synthetic(const Common &common)
{
  const auto ctx = make_context(common);
  const auto &cfg = ctx.cfg;
  const Index n = cfg.integer("synthetic_n");
  const Index steps = cfg.integer("synthetic_steps");
  const double length = cfg.real("synthetic_length");
  const double nu = cfg.real("synthetic_viscosity");
  const double t0 = cfg.real("t0");
  const double dt = cfg.real("dt");
  const auto signal = InputSignal::pressure_forcing(cfg.real("signal_p_ref"), cfg.real("signal_amplitude"),
                                                    cfg.real("signal_frequency"));
  const UniformTimeGrid grid{t0, dt, steps};
  spdlog::info("integrating Burgers model: n = {}, nu = {}, {} steps of {}", n, nu, steps, dt);
  const auto run = forced_burgers_run(n, nu, length, signal, grid);
  const auto &traj = run.trajectory;
  save(ctx.out / "snapshots.oimx", traj.states);
  save(ctx.out / "inputs.oimx", signal.sample(grid.times()));
  save(ctx.out / "times.oimx", grid.times());
  save(ctx.out / "grid.oimx", run.model.x);

  // Companion config so `train --config <out>/train.cfg` runs on this dataset directly.
  RunConfig train_cfg = cfg;
  train_cfg.set("signal", "pressure");
  train_cfg.set("snapshots", "snapshots.oimx");
  train_cfg.set("inputs", "");
  train_cfg.set("output_dir", ".");
  save_text(ctx.out / "train.cfg", train_cfg.to_text());
  spdlog::info("wrote {} snapshots to {}", steps, ctx.out.string());
  return 0;
}

int cmd_preprocess(const Common &common, const std::string &snapshots_flag)
{
  const auto ctx = make_context(common);
  const auto snaps = load_snapshots(ctx, snapshots_flag);
  const auto layout = ctx.cfg.layout(snaps.Z.rows());
  const auto map = LearningMap::fit(snaps.Z, ctx.cfg.transform(layout));
  save(ctx.out / "learning.oimx", map.forward(snaps.Z));
  save(ctx.out / "scales.oimx", scales_row(map.scaling));
  for (std::size_t v = 0; v < map.scaling.scales.size(); v++)
  {
    spdlog::info("channel {}: scale {}", map.scaling.layout.variables()[v].name, map.scaling.scales[v]);
  }
  return 0;
}

int cmd_pod(const Common &common, const std::string &learning_flag)
{
  const auto ctx = make_context(common);
  const fs::path in = learning_flag.empty() ? ctx.out / "learning.oimx" : fs::path(learning_flag);
  const MatrixXd Q = load(in);
  const auto rsvd = ctx.cfg.rsvd();
  Index r = ctx.cfg.integer("rank");
  if (r == 0)
  {
    r = select_rank(singular_spectrum(Q, std::min(Q.rows(), Q.cols()), rsvd),
                    ctx.cfg.real("energy_threshold"));
  }
  const auto basis = pod(Q, r, rsvd);
  spdlog::info("POD rank {} captures energy {}", r,
               cumulative_energy(basis.singular_values, r, basis.total_energy));
  save(ctx.out / "basis.oimx", basis.V);
  save(ctx.out / "singular_values.oimx", basis.singular_values);
  save(ctx.out / "projected.oimx", project(basis.V, Q));
  return 0;
}

int cmd_rank_report(const Common &common, const std::string &snapshots_flag,
                    const std::vector<double> &thresholds)
{
  const auto ctx = make_context(common);
  const auto snaps = load_snapshots(ctx, snapshots_flag);
  const auto layout = ctx.cfg.layout(snaps.Z.rows());
  const auto map = LearningMap::fit(snaps.Z, ctx.cfg.transform(layout));
  const MatrixXd Q = map.forward(snaps.Z);
  const auto spectrum = singular_spectrum(Q, std::min(Q.rows(), Q.cols()), ctx.cfg.rsvd());
  const Index m = make_signal(ctx, load_inputs(ctx, "", snaps.Z.cols())).dim();
  std::ostringstream os;
  os << "# threshold r d(r,m)  (m = " << m << ", k = " << snaps.Z.cols() << ")\n";
  for (double th : thresholds)
  {
    const Index r = select_rank(spectrum, th);
    os << std::setprecision(6) << th << " " << r << " " << data_dim(r, m) << "\n";
  }
  save_text(ctx.out / "rank_report.txt", os.str());
  std::cout << os.str();
  return 0;
}

int cmd_train(const Common &common, const std::string &snapshots_flag, const std::string &inputs_flag)
{
  const auto ctx = make_context(common);
  const auto snaps = load_snapshots(ctx, snapshots_flag);
  const MatrixXd U_all = load_inputs(ctx, inputs_flag, snaps.Z.cols());
  const auto signal = make_signal(ctx, U_all);

  RegOpInfInputs in;
  in.snapshots = snaps.Z;
  in.grid = snaps.grid;
  in.final_time = snaps.final_time;
  in.signal = signal;
  in.inputs = signal.dim() > 0 ? MatrixXd(signal.sample(snaps.grid.times())) : MatrixXd(0, snaps.Z.cols());
  in.transform = ctx.cfg.transform(ctx.cfg.layout(snaps.Z.rows()));
  if (const auto dpath = data_path(ctx, "", "derivatives"); !dpath.empty())
  {
    in.learning_derivatives = MatrixXd(load(dpath).leftCols(snaps.Z.cols()));
  }

  RegOpInfOptions opts;
  opts.rank = ctx.cfg.integer("rank");
  opts.energy_threshold = ctx.cfg.real("energy_threshold");
  opts.search = ctx.cfg.search();
  opts.rsvd = ctx.cfg.rsvd();

  spdlog::info("training: k = {}, m = {}, horizon [{}, {}]", snaps.Z.cols(), signal.dim(),
               snaps.grid.t0, snaps.final_time);
  const auto result = reg_opinf(in, opts);
  const auto &rep = result.report;
  spdlog::info("r = {}, d = {}, bound = {}", result.basis.rank(), data_dim(result.basis.rank(), signal.dim()),
               result.bound);
  spdlog::info("winner lambda1 = {}, lambda2 = {}, error = {} ({} evaluations, {} bound-disqualified, "
               "{} integrator failures)",
               rep.winner.reg.lambda1, rep.winner.reg.lambda2, rep.winner.error, rep.evaluations.size(),
               rep.count(Outcome::bound_violated), rep.count(Outcome::integrator_failed));

  save(ctx.out / "basis.oimx", result.basis.V);
  save(ctx.out / "singular_values.oimx", result.basis.singular_values);
  save(ctx.out / "scales.oimx", scales_row(result.map.scaling));
  save(ctx.out / "projected.oimx", result.projected);
  save(ctx.out / "ops_c.oimx", result.operators.c);
  save(ctx.out / "ops_A.oimx", result.operators.A);
  save(ctx.out / "ops_H.oimx", result.operators.H);
  save(ctx.out / "ops_B.oimx", result.operators.B);
  std::ostringstream meta;
  meta << "r = " << result.operators.r() << "\nm = " << result.operators.m()
       << "\nlambda1 = " << fmt_real(rep.winner.reg.lambda1) << "\nlambda2 = " << fmt_real(rep.winner.reg.lambda2)
       << "\nbound = " << fmt_real(result.bound) << "\ntrain_error = " << fmt_real(rep.winner.error)
       << "\nt0 = " << fmt_real(snaps.grid.t0) << "\ndt = " << fmt_real(snaps.grid.dt) << "\nk = " << snaps.grid.k
       << "\ntf = " << fmt_real(snaps.final_time) << "\n";
  save_text(ctx.out / "operators.meta", meta.str());
  save_text(ctx.out / "search_report.txt",
            format_report(rep, opts.search) + "#\n# configuration\n" + ctx.cfg.to_text());
  return 0;
}

int cmd_simulate(const Common &common, const std::string &ops_dir_flag, const std::string &inputs_flag)
{
  const auto ctx = make_context(common);
  const fs::path dir = ops_dir_flag.empty() ? ctx.out : fs::path(ops_dir_flag);
  const auto meta = read_meta(dir / "operators.meta");
  RomOperators ops{load(dir / "ops_c.oimx"), load(dir / "ops_A.oimx"), load(dir / "ops_H.oimx"),
                   load(dir / "ops_B.oimx")};
  ops.check();
  const MatrixXd Qhat = load(dir / "projected.oimx");
  if (Qhat.rows() != ops.r())
  {
    throw DimensionError("projected data has " + std::to_string(Qhat.rows()) + " rows, operators have r = " +
                         std::to_string(ops.r()));
  }
  const UniformTimeGrid grid{meta_real(meta, "t0"), meta_real(meta, "dt"), Qhat.cols()};
  const double tf = ctx.cfg.real("tf") == 0.0 ? meta_real(meta, "tf") : ctx.cfg.real("tf");
  const MatrixXd U_all = load_inputs(ctx, inputs_flag, 0);
  const auto signal = make_signal(ctx, U_all);
  if (signal.dim() != ops.m())
  {
    throw DimensionError("input signal has dimension " + std::to_string(signal.dim()) +
                         ", operators expect m = " + std::to_string(ops.m()));
  }
  const VectorXd times = TrainingProblem::output_times(grid, tf);
  const auto traj = integrate(ops, Qhat.col(0), signal, times, ctx.cfg.integration(), meta_real(meta, "bound"));
  save(ctx.out / "trajectory.oimx", traj.states);
  save(ctx.out / "trajectory_times.oimx", traj.times);
  std::ostringstream st;
  st << "status = " << to_string(traj.status.kind) << "\nt = " << fmt_real(traj.status.t)
     << "\nindex = " << traj.status.index << "\nreason = " << traj.status.reason
     << "\nsteps = " << traj.steps << "\nrejected = " << traj.rejected << "\n";
  save_text(ctx.out / "trajectory.status", st.str());
  if (!traj.status.ok())
  {
    spdlog::warn("integration stopped: {} at t = {} ({})", to_string(traj.status.kind), traj.status.t,
                 traj.status.reason);
  }
  spdlog::info("trajectory: {} output times, {} steps", traj.times.size(), traj.steps);
  return 0;
}

int cmd_evaluate(const Common &common, const std::string &snapshots_flag, const std::string &dir_flag)
{
  const auto ctx = make_context(common);
  const fs::path dir = dir_flag.empty() ? ctx.out : fs::path(dir_flag);
  const auto snaps = load_snapshots(ctx, snapshots_flag);
  const MatrixXd V = load(dir / "basis.oimx");
  const MatrixXd traj = load(dir / "trajectory.oimx");
  const MatrixXd traj_times = load(dir / "trajectory_times.oimx");
  if (traj.rows() != V.cols())
  {
    throw DimensionError("trajectory has " + std::to_string(traj.rows()) + " rows, basis has r = " +
                         std::to_string(V.cols()));
  }
  const auto map = load_map(ctx, snaps.all.rows(), dir / "scales.oimx");
  if (map.transform.target().rows() != V.rows())
  {
    throw DimensionError("basis has " + std::to_string(V.rows()) + " rows, learning layout has " +
                         std::to_string(map.transform.target().rows()));
  }
  // Compare on the snapshot columns the trajectory reached.
  const Index cols = std::min<Index>(snaps.all.cols(), traj.cols());
  const UniformTimeGrid grid{ctx.cfg.real("t0"), ctx.cfg.real("dt"), cols};
  const VectorXd times = grid.times();
  for (Index j = 0; j < cols; j++)
  {
    if (std::abs(traj_times(j) - times(j)) > 1e-9 * std::max(1.0, std::abs(times(j))))
    {
      throw DimensionError("trajectory time " + std::to_string(j) + " does not match the snapshot grid");
    }
  }
  const MatrixXd Z = snaps.all.leftCols(cols);
  const MatrixXd Qtilde = traj.leftCols(cols);

  auto names = ctx.cfg.list("evaluate_variables");
  if (names.empty())
  {
    for (const auto &v : map.transform.source().variables())
    {
      names.push_back(v.name);
    }
  }
  std::ostringstream summary;
  summary << "# variable window mean_projerr mean_prederr\n";
  const Index k = std::min<Index>(snaps.grid.k, cols);
  for (const auto &name : names)
  {
    const VectorXd proj = projection_error_series(Z, map, V, name);
    const VectorXd pred = prediction_error_series(Z, Qtilde, map, V, name);
    write_series(dir / ("projerr_" + name + ".txt"), times, proj, "s_projerr");
    write_series(dir / ("prederr_" + name + ".txt"), times, pred, "s_prederr");
    summary << name << " train " << fmt_real(proj.head(k).mean()) << " " << fmt_real(pred.head(k).mean()) << "\n";
    if (cols > k)
    {
      summary << name << " predict " << fmt_real(proj.tail(cols - k).mean()) << " "
              << fmt_real(pred.tail(cols - k).mean()) << "\n";
    }
    spdlog::info("{}: mean training-window prediction error {}", name, pred.head(k).mean());
  }
  save_text(dir / "evaluation_summary.txt", summary.str());

  const auto monitors = ctx.cfg.list("monitors");
  if (!monitors.empty())
  {
    const MatrixXd recon = map.reverse(V * Qtilde);
    const auto &layout = map.transform.source();
    for (const auto &item : monitors)
    {
      const Index cell = std::stoll(item);
      if (cell < 0 || cell >= layout.cells())
      {
        throw DimensionError("monitor index " + item + " outside [0, " + std::to_string(layout.cells()) + ")");
      }
      std::ostringstream os;
      os << "# time";
      for (const auto &v : layout.variables())
      {
        os << " " << v.name << "_truth " << v.name << "_rom";
      }
      os << "\n";
      for (Index j = 0; j < cols; j++)
      {
        os << fmt_real(times(j));
        for (Index v = 0; v < layout.num_variables(); v++)
        {
          const Index row = layout.offset(v) + cell;
          os << " " << fmt_real(Z(row, j)) << " " << fmt_real(recon(row, j));
        }
        os << "\n";
      }
      save_text(dir / ("monitor_" + item + ".txt"), os.str());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  configure_logging();

  CLI::App app{"Learn quadratic reduced-order models from snapshot data"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name
  Common common;
  app.add_option("--config", common.config_path, "run configuration file (key = value lines)");
  app.add_option("--seed", common.seed, "randomized SVD seed (overrides config)");
  app.add_option("--out", common.out, "output directory (overrides config)");
  app.add_option("--threads", common.threads, "grid-search worker threads (overrides config)")
    ->check(CLI::PositiveNumber);

  std::string snapshots;
  std::string inputs;
  std::string learning;
  std::string dir;
  std::vector<double> thresholds = {0.985, 0.990, 0.995};

  auto *synth = app.add_subcommand("make-synthetic", "write a viscous Burgers dataset with boundary forcing");
  auto *pre = app.add_subcommand("preprocess", "transform and scale training snapshots");
  pre->add_option("--snapshots", snapshots, "snapshot matrix (overrides config)");
  auto *pod_cmd = app.add_subcommand("pod", "compute the POD basis of preprocessed snapshots");
  pod_cmd->add_option("--learning", learning, "preprocessed snapshots (default <out>/learning.oimx)");
  auto *rank = app.add_subcommand("rank-report", "basis size needed for each energy threshold");
  rank->add_option("--snapshots", snapshots, "snapshot matrix (overrides config)");
  rank->add_option("--thresholds", thresholds, "energy thresholds in (0, 1)")->delimiter(',');
  auto *train = app.add_subcommand("train", "learn operators with regularization selection");
  train->add_option("--snapshots", snapshots, "snapshot matrix (overrides config)");
  train->add_option("--inputs", inputs, "input matrix (overrides config)");
  auto *sim = app.add_subcommand("simulate", "integrate trained operators over [t0, tf]");
  sim->add_option("--operators", dir, "directory holding trained artifacts (default <out>)");
  sim->add_option("--inputs", inputs, "input matrix (overrides config)");
  auto *eval = app.add_subcommand("evaluate", "error tables and monitor traces against truth");
  eval->add_option("--snapshots", snapshots, "truth snapshots (overrides config)");
  eval->add_option("--artifacts", dir, "directory holding basis and trajectory (default <out>)");

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (synth->parsed())
    {
      return cmd_make_synthetic(common);
    }
    if (pre->parsed())
    {
      return cmd_preprocess(common, snapshots);
    }
    if (pod_cmd->parsed())
    {
      return cmd_pod(common, learning);
    }
    if (rank->parsed())
    {
      return cmd_rank_report(common, snapshots, thresholds);
    }
    if (train->parsed())
    {
      return cmd_train(common, snapshots, inputs);
    }
    if (sim->parsed())
    {
      return cmd_simulate(common, dir, inputs);
    }
    if (eval->parsed())
    {
      return cmd_evaluate(common, snapshots, dir);
    }
  }
  catch (const MissingFileError &e)
  {
    spdlog::error("{}", e.what());
    return kExitMissingFile;
  }
  catch (const OverParameterizedError &e)
  {
    spdlog::error("over-parameterized: {}", e.what());
    return kExitOverParameterized;
  }
  catch (const std::exception &e)
  {
    spdlog::error("{}", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}
