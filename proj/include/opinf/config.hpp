#ifndef OPINF_CONFIG_HPP
#define OPINF_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "opinf/error.hpp"
#include "opinf/io.hpp"
#include "opinf/ode.hpp"
#include "opinf/pod.hpp"
#include "opinf/preprocess.hpp"
#include "opinf/regsearch.hpp"
#include "opinf/rom.hpp"

//
// Line-based run configuration: `key = value`, '#' starts a comment. Unknown keys are
// rejected. Every key has a default except the data paths.
//
namespace opinf
{

struct ConfigKey
{
  std::string_view key;
  std::string_view fallback;
  std::string_view doc;
};

// clang-format off
inline constexpr ConfigKey kConfigKeys[] = {
  {"variables",          "q:signed", "native variables, comma list of name:kind (kind = signed | nonnegative)"},
  {"cells",              "0",        "spatial points per variable; 0 infers rows / #variables"},
  {"transform",          "identity", "'identity' or comma list of target:kind:op:source[:divisor], op = identity | reciprocal | scaled_ratio"},
  {"reconstruct",        "",         "comma list of native:channel choosing the channel that rebuilds each native variable"},
  {"rank",               "0",        "reduced dimension r; 0 selects r by energy_threshold"},
  {"energy_threshold",   "0.985",    "cumulative energy that r must exceed when rank = 0"},
  {"tau",                "1.5",      "bound margin, B = tau * max|Qhat|"},
  {"lambda1_log10_min",  "0",        "grid: smallest log10(lambda1)"},
  {"lambda1_log10_max",  "5",        "grid: largest log10(lambda1)"},
  {"lambda1_count",      "6",        "grid: points along lambda1"},
  {"lambda2_log10_min",  "0",        "grid: smallest log10(lambda2)"},
  {"lambda2_log10_max",  "5",        "grid: largest log10(lambda2)"},
  {"lambda2_count",      "6",        "grid: points along lambda2"},
  {"nm_initial_step",    "0.5",      "Nelder-Mead initial simplex edge in log10 units"},
  {"nm_max_iterations",  "100",      "Nelder-Mead iteration cap"},
  {"nm_max_evaluations", "200",      "Nelder-Mead evaluation cap"},
  {"nm_xtol",            "1e-3",     "Nelder-Mead simplex size tolerance (log10 units)"},
  {"nm_ftol",            "1e-10",    "Nelder-Mead value spread tolerance"},
  {"rtol",               "1e-6",     "ROM integration relative tolerance"},
  {"atol",               "1e-9",     "ROM integration absolute tolerance"},
  {"t0",                 "0",        "time of the first snapshot"},
  {"dt",                 "1",        "snapshot spacing"},
  {"k",                  "0",        "training snapshots to use; 0 uses every column"},
  {"tf",                 "0",        "final time of the ROM horizon; 0 means the last training time"},
  {"signal",             "none",     "input signal: none | pressure | sampled (interpolate the inputs file)"},
  {"signal_p_ref",       "1e6",      "pressure forcing reference value"},
  {"signal_amplitude",   "0.1",      "pressure forcing relative amplitude"},
  {"signal_frequency",   "5000",     "pressure forcing frequency"},
  {"seed",               "0",        "random seed for the randomized SVD"},
  {"oversampling",       "10",       "randomized SVD oversampling"},
  {"power_iterations",   "2",        "randomized SVD power iterations"},
  {"threads",            "1",        "worker threads for the grid search"},
  {"output_dir",         "out",      "artifact directory"},
  {"monitors",           "",         "comma list of spatial indices traced by evaluate"},
  {"evaluate_variables", "",         "comma list of native variables evaluated; empty means all"},
  {"synthetic_n",        "256",      "make-synthetic: Burgers grid points"},
  {"synthetic_viscosity","0.01",     "make-synthetic: viscosity"},
  {"synthetic_length",   "1",        "make-synthetic: domain length"},
  {"synthetic_steps",    "1000",     "make-synthetic: total snapshots written"},
  {"snapshots",          "",         "snapshot matrix path (no default)"},
  {"inputs",             "",         "input matrix path (no default)"},
  {"derivatives",        "",         "optional learning-variable time derivatives path"},
};
// clang-format on

class RunConfig
{
public:
  RunConfig()
  {
    for (const auto &k : kConfigKeys)
    {
      values_[std::string(k.key)] = std::string(k.fallback);
    }
  }

  static RunConfig parse(const std::string &text, const std::string &origin = "<config>")
  {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
      lineno++;
      if (auto hash = line.find('#'); hash != std::string::npos)
      {
        line.erase(hash);
      }
      const auto trimmed = trim(line);
      if (trimmed.empty())
      {
        continue;
      }
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
      {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      }
      cfg.set(trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)),
              origin + ":" + std::to_string(lineno));
    }
    return cfg;
  }

  static RunConfig load(const std::filesystem::path &path)
  {
    const auto bytes = io::read_bytes(path);
    return parse(std::string(bytes.begin(), bytes.end()), path.string());
  }

  void set(const std::string &key, const std::string &value, const std::string &where = "")
  {
    auto it = values_.find(key);
    if (it == values_.end())
    {
      throw ConfigError((where.empty() ? "" : where + ": ") + "unknown key '" + key + "'");
    }
    it->second = value;
  }

  const std::string &str(const std::string &key) const
  {
    auto it = values_.find(key);
    if (it == values_.end())
    {
      throw ConfigError("unknown key '" + key + "'");
    }
    return it->second;
  }

  double real(const std::string &key) const
  {
    const auto &v = str(key);
    try
    {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      if (used != v.size())
      {
        throw std::invalid_argument(v);
      }
      return x;
    }
    catch (const std::exception &)
    {
      throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
  }

  long long integer(const std::string &key) const
  {
    const auto &v = str(key);
    try
    {
      std::size_t used = 0;
      const long long x = std::stoll(v, &used);
      if (used != v.size())
      {
        throw std::invalid_argument(v);
      }
      return x;
    }
    catch (const std::exception &)
    {
      throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
  }

  std::vector<std::string> list(const std::string &key) const { return split(str(key), ','); }

  // Canonical text form, one `key = value` per line in table order.
  std::string to_text() const
  {
    std::ostringstream os;
    for (const auto &k : kConfigKeys)
    {
      os << k.key << " = " << values_.at(std::string(k.key)) << "\n";
    }
    return os.str();
  }

  VariableLayout layout(Index rows) const
  {
    std::vector<Variable> vars;
    for (const auto &item : list("variables"))
    {
      const auto parts = split(item, ':');
      if (parts.size() != 2)
      {
        throw ConfigError("variables: expected name:kind, got '" + item + "'");
      }
      vars.push_back({parts[0], parse_kind(parts[1])});
    }
    if (vars.empty())
    {
      throw ConfigError("variables: at least one variable required");
    }
    Index cells = integer("cells");
    const auto nv = static_cast<Index>(vars.size());
    if (cells == 0)
    {
      if (rows % nv != 0)
      {
        throw ConfigError("variables: " + std::to_string(rows) + " rows do not split into " +
                          std::to_string(nv) + " equal blocks");
      }
      cells = rows / nv;
    }
    return VariableLayout(std::move(vars), cells);
  }

  TransformSpec transform(const VariableLayout &source) const
  {
    if (trim(str("transform")) == "identity")
    {
      return TransformSpec::identity(source);
    }
    std::vector<ChannelMap> channels;
    for (const auto &item : list("transform"))
    {
      const auto p = split(item, ':');
      if (p.size() != 4 && p.size() != 5)
      {
        throw ConfigError("transform: expected target:kind:op:source[:divisor], got '" + item + "'");
      }
      ChannelMap ch{{p[0], parse_kind(p[1])}, ChannelOp::identity, p[3], 1.0};
      if (p[2] == "identity")
      {
        ch.op = ChannelOp::identity;
      }
      else if (p[2] == "reciprocal")
      {
        ch.op = ChannelOp::reciprocal;
      }
      else if (p[2] == "scaled_ratio")
      {
        ch.op = ChannelOp::scaled_ratio;
        if (p.size() != 5)
        {
          throw ConfigError("transform: scaled_ratio needs a divisor in '" + item + "'");
        }
        try
        {
          ch.divisor = std::stod(p[4]);
        }
        catch (const std::exception &)
        {
          throw ConfigError("transform: bad divisor in '" + item + "'");
        }
      }
      else
      {
        throw ConfigError("transform: unknown op '" + p[2] + "'");
      }
      channels.push_back(std::move(ch));
    }
    std::vector<std::pair<std::string, std::string>> reconstruct;
    for (const auto &item : list("reconstruct"))
    {
      const auto p = split(item, ':');
      if (p.size() != 2)
      {
        throw ConfigError("reconstruct: expected native:channel, got '" + item + "'");
      }
      reconstruct.emplace_back(p[0], p[1]);
    }
    return TransformSpec(source, std::move(channels), std::move(reconstruct));
  }

  OdeOptions integration() const
  {
    OdeOptions o;
    o.rtol = real("rtol");
    o.atol = real("atol");
    return o;
  }

  SearchConfig search() const
  {
    SearchConfig s;
    s.tau = real("tau");
    s.lambda1 = {real("lambda1_log10_min"), real("lambda1_log10_max"),
                 static_cast<int>(integer("lambda1_count"))};
    s.lambda2 = {real("lambda2_log10_min"), real("lambda2_log10_max"),
                 static_cast<int>(integer("lambda2_count"))};
    s.nm.initial_step = real("nm_initial_step");
    s.nm.max_iterations = static_cast<int>(integer("nm_max_iterations"));
    s.nm.max_evaluations = static_cast<int>(integer("nm_max_evaluations"));
    s.nm.xtol = real("nm_xtol");
    s.nm.ftol = real("nm_ftol");
    s.integration = integration();
    s.threads = static_cast<int>(integer("threads"));
    s.validate();
    return s;
  }

  RsvdOptions rsvd() const
  {
    RsvdOptions o;
    o.seed = static_cast<std::uint64_t>(integer("seed"));
    o.oversampling = integer("oversampling");
    o.power_iterations = integer("power_iterations");
    return o;
  }

  // Input signal; `samples` (m x k with times) backs the sampled mode.
  InputSignal signal(const VectorXd &times, const MatrixXd &samples) const
  {
    const auto kind = trim(str("signal"));
    if (kind == "none")
    {
      return InputSignal::none();
    }
    if (kind == "pressure")
    {
      return InputSignal::pressure_forcing(real("signal_p_ref"), real("signal_amplitude"),
                                           real("signal_frequency"));
    }
    if (kind == "sampled")
    {
      if (samples.rows() == 0)
      {
        throw ConfigError("signal = sampled requires an inputs file");
      }
      return InputSignal::sampled(times, samples);
    }
    throw ConfigError("signal: expected none | pressure | sampled, got '" + kind + "'");
  }

  static std::string trim(const std::string &s)
  {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
    {
      return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  static std::vector<std::string> split(const std::string &s, char sep)
  {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep))
    {
      item = trim(item);
      if (!item.empty())
      {
        out.push_back(item);
      }
    }
    return out;
  }

private:
  static VariableKind parse_kind(const std::string &s)
  {
    if (s == "signed")
    {
      return VariableKind::signed_;
    }
    if (s == "nonnegative")
    {
      return VariableKind::nonnegative;
    }
    throw ConfigError("variable kind must be signed or nonnegative, got '" + s + "'");
  }

  std::map<std::string, std::string> values_;
};

}  // namespace opinf

#endif  // OPINF_CONFIG_HPP
