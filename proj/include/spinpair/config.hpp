// config.hpp - run configuration: per-command defaults, a small INI-style
// file format (sections, key = value, # or ; comments), grid expressions,
// and CLI overrides. Unknown sections or keys are hard errors so a typo can
// never silently fall back to a default.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinpair/bath.hpp"
#include "spinpair/oracle.hpp"
#include "spinpair/quadrature.hpp"
#include "spinpair/redfield.hpp"
#include "spinpair/system.hpp"

namespace spinpair {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunKind { fig2, fig3, fig4, evolve, oracle_check };

// Whether the time-series command also runs the discretized-bath propagation.
enum class OracleEmit { automatic, on, off };

struct McConfig {
  long n_traj = 100000;
  std::uint64_t seed = 12345;
};

struct RunConfig {
  RunKind kind = RunKind::fig2;
  SystemParams sys;
  BathParams bath;
  InitialState init;
  RateMode mode = RateMode::full;
  quad::QuadratureConfig quad;

  OracleOptions oracle;
  OracleEmit oracle_emit = OracleEmit::automatic;

  double evolve_t_final = 500.0;
  double evolve_dt = 0.0;  // <= 0: automatic step choice
  int evolve_n_samples = 201;

  std::vector<double> g_grid;         // coupling sweep
  std::vector<double> gamma0_list;    // bath-strength curves / check pairs
  std::vector<double> g_list;        // check pairs
  std::vector<double> inv_temp_grid;  // temperature sweep

  McConfig mc;
  int workers = 0;  // 0: use the hardware concurrency
  std::string out_path;
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * i / (n - 1);
  }
  return out;
}

inline std::vector<double> geomspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < n; ++i) {
    out[i] = std::pow(10.0, llo + (lhi - llo) * i / (n - 1));
  }
  return out;
}

}  // namespace detail

// Grid expressions: "lo:hi:n" (linear, inclusive), "log:lo:hi:n" (geometric,
// inclusive, positive endpoints), or a comma list "a,b,c".
inline std::vector<double> parse_grid(const std::string& text);

// Per-command defaults; a config file and CLI flags refine these.
inline RunConfig default_config(RunKind kind) {
  RunConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case RunKind::fig2:
      cfg.g_grid = detail::linspace(0.0, 0.15, 31);
      cfg.gamma0_list = {0.01, 0.02, 0.05, 0.1};
      cfg.out_path = "fig2.csv";
      break;
    case RunKind::fig3:
      cfg.sys.g = 0.1;
      cfg.inv_temp_grid = detail::geomspace(1e-3, 1e2, 61);
      cfg.out_path = "fig3.csv";
      break;
    case RunKind::fig4:
      cfg.sys.g = 0.1;
      cfg.bath.s_exp = 0.5;
      cfg.bath.xi_c = 3.0;
      cfg.inv_temp_grid = detail::geomspace(1e-3, 1.0, 49);
      // The slow-rate vs telegraph-rate comparison is this sweep's point;
      // the principal-value shifts triple the slow rate at high temperature
      // and bury it, so the bare rates are the default here.
      cfg.mode = RateMode::no_lamb_shift;
      cfg.out_path = "fig4.csv";
      break;
    case RunKind::evolve:
      cfg.sys.g = 0.1;
      cfg.out_path = "evolve.csv";
      break;
    case RunKind::oracle_check:
      cfg.g_list = {0.02, 0.1};
      cfg.gamma0_list = {0.02, 0.05};
      cfg.out_path = "oracle_check.csv";
      break;
  }
  return cfg;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) {
    return "";
  }
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& value, const std::string& where) {
  const std::string t = trim(value);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw ConfigError(where + ": cannot parse '" + value + "' as a number");
  }
  return v;
}

inline long parse_long(const std::string& value, const std::string& where) {
  const std::string t = trim(value);
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw ConfigError(where + ": cannot parse '" + value + "' as an integer");
  }
  return v;
}

inline RateMode parse_mode(const std::string& value, const std::string& where) {
  const std::string t = trim(value);
  if (t == "full") {
    return RateMode::full;
  }
  if (t == "no_lamb_shift") {
    return RateMode::no_lamb_shift;
  }
  if (t == "flat_bath") {
    return RateMode::flat_bath;
  }
  throw ConfigError(where + ": expected full, no_lamb_shift, or flat_bath, got '" + value + "'");
}

inline OracleEmit parse_emit(const std::string& value, const std::string& where) {
  const std::string t = trim(value);
  if (t == "auto") {
    return OracleEmit::automatic;
  }
  if (t == "on") {
    return OracleEmit::on;
  }
  if (t == "off") {
    return OracleEmit::off;
  }
  throw ConfigError(where + ": expected auto, on, or off, got '" + value + "'");
}

inline void apply_key(RunConfig& cfg, const std::string& section, const std::string& key,
                      const std::string& value) {
  const std::string where = "[" + section + "] " + key;
  if (section == "system") {
    if (key == "omega0") {
      cfg.sys.omega0 = parse_double(value, where);
    } else if (key == "g") {
      cfg.sys.g = parse_double(value, where);
    } else {
      throw ConfigError(where + ": unknown key");
    }
  } else if (section == "bath") {
    if (key == "gamma0") {
      cfg.bath.gamma0 = parse_double(value, where);
    } else if (key == "xi_c") {
      cfg.bath.xi_c = parse_double(value, where);
    } else if (key == "s_exp") {
      cfg.bath.s_exp = parse_double(value, where);
    } else if (key == "inv_temp") {
      cfg.bath.inv_temp = parse_double(value, where);  // "inf" means T = 0
    } else {
      throw ConfigError(where + ": unknown key");
    }
  } else if (section == "init") {
    if (key == "a1_re") {
      cfg.init.a1.real(parse_double(value, where));
    } else if (key == "a1_im") {
      cfg.init.a1.imag(parse_double(value, where));
    } else if (key == "a2_re") {
      cfg.init.a2.real(parse_double(value, where));
    } else if (key == "a2_im") {
      cfg.init.a2.imag(parse_double(value, where));
    } else {
      throw ConfigError(where + ": unknown key");
    }
  } else if (section == "rates") {
    if (key == "mode") {
      cfg.mode = parse_mode(value, where);
    } else {
      throw ConfigError(where + ": unknown key");
    }
  } else if (section == "quad") {
    if (key == "abs_tol") {
      cfg.quad.abs_tol = parse_double(value, where);
    } else if (key == "rel_tol") {
      cfg.quad.rel_tol = parse_double(value, where);
    } else if (key == "max_panels") {
      cfg.quad.max_panels = static_cast<std::size_t>(parse_long(value, where));
    } else {
      throw ConfigError(where + ": unknown key");
    }
  } else if (section == "sweep") {
    if (key == "g_grid") {
      cfg.g_grid = parse_grid(value);
    } else if (key == "gamma0_list") {
      cfg.gamma0_list = parse_grid(value);
    } else if (key == "g_list") {
      cfg.g_list = parse_grid(value);
    } else if (key == "inv_temp_grid") {
      cfg.inv_temp_grid = parse_grid(value);
    } else {
      throw ConfigError(where + ": unknown key");
    }
  } else if (section == "oracle") {
    if (key == "n_modes") {
      cfg.oracle.n_modes = static_cast<int>(parse_long(value, where));
    } else if (key == "nu_max") {
      cfg.oracle.nu_max = parse_double(value, where);
    } else if (key == "t_final") {
      cfg.oracle.t_final = parse_double(value, where);
    } else if (key == "dt") {
      cfg.oracle.dt = parse_double(value, where);
    } else if (key == "n_samples") {
      cfg.oracle.n_samples = static_cast<int>(parse_long(value, where));
    } else if (key == "norm_tol") {
      cfg.oracle.norm_tol = parse_double(value, where);
    } else if (key == "emit") {
      cfg.oracle_emit = parse_emit(value, where);
    } else {
      throw ConfigError(where + ": unknown key");
    }
  } else if (section == "evolve") {
    if (key == "t_final") {
      cfg.evolve_t_final = parse_double(value, where);
    } else if (key == "dt") {
      cfg.evolve_dt = parse_double(value, where);
    } else if (key == "n_samples") {
      cfg.evolve_n_samples = static_cast<int>(parse_long(value, where));
    } else {
      throw ConfigError(where + ": unknown key");
    }
  } else if (section == "mc") {
    if (key == "n_traj") {
      cfg.mc.n_traj = parse_long(value, where);
    } else if (key == "seed") {
      cfg.mc.seed = static_cast<std::uint64_t>(parse_long(value, where));
    } else {
      throw ConfigError(where + ": unknown key");
    }
  } else if (section == "run") {
    if (key == "workers") {
      cfg.workers = static_cast<int>(parse_long(value, where));
    } else if (key == "out") {
      cfg.out_path = trim(value);
    } else {
      throw ConfigError(where + ": unknown key");
    }
  } else {
    throw ConfigError("unknown config section [" + section + "]");
  }
}

}  // namespace detail

inline std::vector<double> parse_grid(const std::string& text) {
  const std::string t = detail::trim(text);
  if (t.empty()) {
    throw ConfigError("grid: empty expression");
  }

  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const auto pos = s.find(sep, start);
      parts.push_back(s.substr(start, pos - start));
      if (pos == std::string::npos) {
        break;
      }
      start = pos + 1;
    }
    return parts;
  };

  if (t.rfind("log:", 0) == 0) {
    const auto parts = split(t.substr(4), ':');
    if (parts.size() != 3) {
      throw ConfigError("grid: expected log:lo:hi:n, got '" + text + "'");
    }
    const double lo = detail::parse_double(parts[0], "grid");
    const double hi = detail::parse_double(parts[1], "grid");
    const long n = detail::parse_long(parts[2], "grid");
    if (!(lo > 0.0) || !(hi > 0.0) || n < 2) {
      throw ConfigError("grid: log range needs positive endpoints and n >= 2");
    }
    return detail::geomspace(lo, hi, static_cast<int>(n));
  }
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) {
      throw ConfigError("grid: expected lo:hi:n, got '" + text + "'");
    }
    const double lo = detail::parse_double(parts[0], "grid");
    const double hi = detail::parse_double(parts[1], "grid");
    const long n = detail::parse_long(parts[2], "grid");
    if (n < 2) {
      throw ConfigError("grid: linear range needs n >= 2");
    }
    return detail::linspace(lo, hi, static_cast<int>(n));
  }
  std::vector<double> out;
  for (const auto& piece : split(t, ',')) {
    out.push_back(detail::parse_double(piece, "grid"));
  }
  return out;
}

// Applies "key = value" lines from an INI-style stream onto cfg. Sections
// select the parameter group; # and ; start comments; unknown names throw.
inline void load_config(RunConfig& cfg, std::istream& in) {
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) {
      line = line.substr(0, comment);
    }
    line = detail::trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      }
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    try {
      detail::apply_key(cfg, section, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  load_config(cfg, in);
}

// Full validation of a resolved configuration for its run kind.
inline void validate_config(const RunConfig& cfg) {
  cfg.sys.validate();
  cfg.bath.validate();
  cfg.init.validate();

  auto check_sorted_positive = [](const std::vector<double>& v, const char* name,
                                  bool strictly_positive) {
    if (v.empty()) {
      throw ConfigError(std::string(name) + ": grid is empty");
    }
    double prev = -std::numeric_limits<double>::infinity();
    for (double x : v) {
      if (strictly_positive && !(x > 0.0)) {
        throw ConfigError(std::string(name) + ": entries must be positive");
      }
      if (!(x >= prev)) {
        throw ConfigError(std::string(name) + ": grid must be sorted ascending");
      }
      prev = x;
    }
  };

  switch (cfg.kind) {
    case RunKind::fig2:
      check_sorted_positive(cfg.g_grid, "g_grid", false);
      check_sorted_positive(cfg.gamma0_list, "gamma0_list", true);
      for (double g : cfg.g_grid) {
        if (!(g >= 0.0) || !(2.0 * g < cfg.sys.omega0)) {
          throw ConfigError("g_grid: need 0 <= 2g < omega0 for every entry");
        }
      }
      if (!cfg.bath.zero_temperature()) {
        throw ConfigError("fig2: this sweep is defined at zero temperature (inv_temp = inf)");
      }
      break;
    case RunKind::fig3:
    case RunKind::fig4:
      check_sorted_positive(cfg.inv_temp_grid, "inv_temp_grid", true);
      break;
    case RunKind::evolve:
      if (!(cfg.evolve_t_final > 0.0) || cfg.evolve_n_samples < 2) {
        throw ConfigError("evolve: need t_final > 0 and n_samples >= 2");
      }
      break;
    case RunKind::oracle_check:
      check_sorted_positive(cfg.g_list, "g_list", false);
      check_sorted_positive(cfg.gamma0_list, "gamma0_list", true);
      if (!cfg.bath.zero_temperature()) {
        throw ConfigError("oracle-check: the discretized bath runs at zero temperature");
      }
      break;
  }
  if (cfg.workers < 0) {
    throw ConfigError("run.workers must be >= 0");
  }
  if (cfg.mc.n_traj < 1) {
    throw ConfigError("mc.n_traj must be >= 1");
  }
}

// Echo of the resolved configuration, loadable back through load_config.
inline std::string render_config(const RunConfig& cfg) {
  std::ostringstream out;
  char buf[40];
  // Full round-trip precision: a run started from the echoed text must
  // reproduce the original byte for byte.
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  auto grid = [&num](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      s += (i ? "," : "") + num(v[i]);
    }
    return s;
  };
  const char* mode = cfg.mode == RateMode::full            ? "full"
                     : cfg.mode == RateMode::no_lamb_shift ? "no_lamb_shift"
                                                           : "flat_bath";
  const char* emit = cfg.oracle_emit == OracleEmit::automatic ? "auto"
                     : cfg.oracle_emit == OracleEmit::on      ? "on"
                                                              : "off";
  out << "[system]\n"
      << "omega0 = " << num(cfg.sys.omega0) << "\n"
      << "g = " << num(cfg.sys.g) << "\n\n"
      << "[bath]\n"
      << "gamma0 = " << num(cfg.bath.gamma0) << "\n"
      << "xi_c = " << num(cfg.bath.xi_c) << "\n"
      << "s_exp = " << num(cfg.bath.s_exp) << "\n"
      << "inv_temp = " << num(cfg.bath.inv_temp) << "\n\n"
      << "[init]\n"
      << "a1_re = " << num(cfg.init.a1.real()) << "\n"
      << "a1_im = " << num(cfg.init.a1.imag()) << "\n"
      << "a2_re = " << num(cfg.init.a2.real()) << "\n"
      << "a2_im = " << num(cfg.init.a2.imag()) << "\n\n"
      << "[rates]\n"
      << "mode = " << mode << "\n\n"
      << "[quad]\n"
      << "abs_tol = " << num(cfg.quad.abs_tol) << "\n"
      << "rel_tol = " << num(cfg.quad.rel_tol) << "\n"
      << "max_panels = " << cfg.quad.max_panels << "\n\n"
      << "[sweep]\n";
  if (!cfg.g_grid.empty()) {
    out << "g_grid = " << grid(cfg.g_grid) << "\n";
  }
  if (!cfg.gamma0_list.empty()) {
    out << "gamma0_list = " << grid(cfg.gamma0_list) << "\n";
  }
  if (!cfg.g_list.empty()) {
    out << "g_list = " << grid(cfg.g_list) << "\n";
  }
  if (!cfg.inv_temp_grid.empty()) {
    out << "inv_temp_grid = " << grid(cfg.inv_temp_grid) << "\n";
  }
  out << "\n[oracle]\n"
      << "n_modes = " << cfg.oracle.n_modes << "\n"
      << "nu_max = " << num(cfg.oracle.nu_max) << "\n"
      << "t_final = " << num(cfg.oracle.t_final) << "\n"
      << "dt = " << num(cfg.oracle.dt) << "\n"
      << "n_samples = " << cfg.oracle.n_samples << "\n"
      << "norm_tol = " << num(cfg.oracle.norm_tol) << "\n"
      << "emit = " << emit << "\n\n"
      << "[evolve]\n"
      << "t_final = " << num(cfg.evolve_t_final) << "\n"
      << "dt = " << num(cfg.evolve_dt) << "\n"
      << "n_samples = " << cfg.evolve_n_samples << "\n\n"
      << "[mc]\n"
      << "n_traj = " << cfg.mc.n_traj << "\n"
      << "seed = " << cfg.mc.seed << "\n\n"
      << "[run]\n"
      << "workers = " << cfg.workers << "\n"
      << "out = " << cfg.out_path << "\n";
  return out.str();
}

}  // namespace spinpair
