// sweep.hpp - parameter sweeps behind the figure-reproduction commands. Each
// run_* function turns a validated RunConfig into a Table; grid points are
// independent, so they are mapped across a thread pool with results stored
// by index (deterministic output regardless of scheduling).
#pragma once

#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "spinpair/config.hpp"
#include "spinpair/exact.hpp"
#include "spinpair/oracle.hpp"
#include "spinpair/redfield.hpp"
#include "spinpair/rtn.hpp"
#include "spinpair/table.hpp"

namespace spinpair {

inline int resolve_workers(int requested) {
  if (requested > 0) {
    return requested;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, n), split into contiguous index blocks across at
// most `workers` threads. The first exception thrown by any task is
// rethrown on the caller after all threads join.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const int n_threads = static_cast<int>(std::min<std::size_t>(resolve_workers(workers), n));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    const std::size_t lo = n * t / n_threads;
    const std::size_t hi = n * (t + 1) / n_threads;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) {
            first_error = std::current_exception();
          }
          return;
        }
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

// Steady nuclear coherence vs coupling, one curve per bath strength:
// the exact continuum integral next to the Born-Markov plateau value.
inline Table run_fig2(const RunConfig& cfg) {
  Table table;
  table.columns = {"gamma0",    "g",         "exact_re",  "exact_im",
                   "exact_abs", "markov_re", "markov_im", "markov_abs"};

  const std::size_t n_g = cfg.g_grid.size();
  const std::size_t n_rows = cfg.gamma0_list.size() * n_g;
  std::vector<std::vector<double>> rows(n_rows);

  ExactOptions exact_opt;
  exact_opt.outer = cfg.quad;

  parallel_for(n_rows, cfg.workers, [&](std::size_t i) {
    SystemParams sys = cfg.sys;
    BathParams bath = cfg.bath;
    bath.gamma0 = cfg.gamma0_list[i / n_g];
    sys.g = cfg.g_grid[i % n_g];
    const auto exact = exact_steady_coherence(sys, bath, cfg.init, exact_opt);
    const auto sol = mqme_coefficients(sys, bath, cfg.init, cfg.mode, cfg.quad);
    rows[i] = {bath.gamma0,      sys.g,
               exact.real(),     exact.imag(),
               std::abs(exact),  sol.r_lower.real(),
               sol.r_lower.imag(), std::abs(sol.r_lower)};
  });

  for (auto& row : rows) {
    table.add_row(std::move(row));
  }
  return table;
}

// Plateau coherences and decay rates vs inverse temperature.
inline Table run_fig3(const RunConfig& cfg) {
  Table table;
  table.columns = {"inv_temp",       "r_lower_abs",    "r_upper_abs",
                   "r_sum_abs",      "re_kappa_plus",  "re_kappa_minus",
                   "qss_ratio",      "qss_meaningful"};

  std::vector<std::vector<double>> rows(cfg.inv_temp_grid.size());
  parallel_for(rows.size(), cfg.workers, [&](std::size_t i) {
    BathParams bath = cfg.bath;
    bath.inv_temp = cfg.inv_temp_grid[i];
    const auto sol = mqme_coefficients(cfg.sys, bath, cfg.init, cfg.mode, cfg.quad);
    const auto qss = qss_extract(sol);
    rows[i] = {bath.inv_temp,
               std::abs(sol.r_lower),
               std::abs(sol.r_upper),
               std::abs(sol.r_lower + sol.r_upper),
               sol.kappa_plus.real(),
               sol.kappa_minus.real(),
               qss.ratio,
               qss.meaningful ? 1.0 : 0.0};
  });

  for (auto& row : rows) {
    table.add_row(std::move(row));
  }
  return table;
}

// Quantum decay rates next to the telegraph-noise rates vs inverse
// temperature, with the bath spectral width and the Markov-validity ratio.
// The analytic telegraph columns are NaN where the expansion breaks
// (g >= lam, deep cold).
inline Table run_fig4(const RunConfig& cfg) {
  Table table;
  table.columns = {"inv_temp",        "re_kappa_plus",    "re_kappa_minus",
                   "kappa_sc_leading", "kappa_sc_corrected", "spectral_width",
                   "markov_ratio"};

  const double width = spectral_width(cfg.bath);
  std::vector<std::vector<double>> rows(cfg.inv_temp_grid.size());
  parallel_for(rows.size(), cfg.workers, [&](std::size_t i) {
    BathParams bath = cfg.bath;
    bath.inv_temp = cfg.inv_temp_grid[i];
    const auto sol = mqme_coefficients(cfg.sys, bath, cfg.init, cfg.mode, cfg.quad);
    const double lam = flip_rate(cfg.sys, bath);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double leading = lam > 0.0 ? kappa_sc_leading(lam, cfg.sys.g) : nan;
    const double corrected = cfg.sys.g < lam ? kappa_sc(lam, cfg.sys.g) : nan;
    rows[i] = {bath.inv_temp,    sol.kappa_plus.real(), sol.kappa_minus.real(),
               leading,          corrected,             width,
               sol.kappa_plus.real() / width};
  });

  for (auto& row : rows) {
    table.add_row(std::move(row));
  }
  return table;
}

// Time series of the two coherence blocks from the closed form and from the
// 4x4 integrator, optionally alongside the discretized-bath propagation.
inline Table run_evolve(const RunConfig& cfg) {
  const bool emit_oracle =
      cfg.oracle_emit == OracleEmit::on ||
      (cfg.oracle_emit == OracleEmit::automatic && cfg.bath.zero_temperature() &&
       cfg.bath.gamma0 > 0.0);

  RedfieldOptions ode_opt;
  ode_opt.t_final = cfg.evolve_t_final;
  ode_opt.dt = cfg.evolve_dt;
  ode_opt.n_samples = cfg.evolve_n_samples;
  ode_opt.mode = cfg.mode;
  const auto traj = integrate_redfield(cfg.sys, cfg.bath, cfg.init, ode_opt, cfg.quad);
  const auto sol = mqme_coefficients(cfg.sys, cfg.bath, cfg.init, cfg.mode, cfg.quad);

  Table table;
  table.columns = {"t",
                   "analytic_lower_re",
                   "analytic_lower_im",
                   "analytic_upper_re",
                   "analytic_upper_im",
                   "ode_lower_re",
                   "ode_lower_im",
                   "ode_upper_re",
                   "ode_upper_im"};

  OracleSeries oracle;
  if (emit_oracle) {
    OracleOptions opt = cfg.oracle;
    opt.t_final = cfg.evolve_t_final;
    opt.n_samples = cfg.evolve_n_samples;
    oracle = oracle_coherence(cfg.sys, cfg.bath, cfg.init, opt);
    table.columns.insert(table.columns.end(),
                         {"oracle_lower_re", "oracle_lower_im", "oracle_upper_re",
                          "oracle_upper_im"});
  }

  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    const auto closed = coherence_trajectories(sol, traj.t[k]);
    const auto blocks = coherence_blocks(traj.rho[k]);
    std::vector<double> row = {traj.t[k],
                               closed.lower.real(),
                               closed.lower.imag(),
                               closed.upper.real(),
                               closed.upper.imag(),
                               blocks.lower.real(),
                               blocks.lower.imag(),
                               blocks.upper.real(),
                               blocks.upper.imag()};
    if (emit_oracle) {
      row.insert(row.end(), {oracle.ground[k].real(), oracle.ground[k].imag(),
                             oracle.excited[k].real(), oracle.excited[k].imag()});
    }
    table.add_row(std::move(row));
  }
  return table;
}

// Long-time coherence of the continuum integral against the discretized
// bath, one row per (g, gamma0) pair.
inline Table run_oracle_check(const RunConfig& cfg) {
  Table table;
  table.columns = {"g",         "gamma0",   "exact_re",        "exact_im",
                   "oracle_re", "oracle_im", "abs_diff",        "t_final",
                   "recurrence_time", "warned"};

  const std::size_t n_gamma = cfg.gamma0_list.size();
  const std::size_t n_rows = cfg.g_list.size() * n_gamma;
  std::vector<std::vector<double>> rows(n_rows);

  ExactOptions exact_opt;
  exact_opt.outer = cfg.quad;

  parallel_for(n_rows, cfg.workers, [&](std::size_t i) {
    SystemParams sys = cfg.sys;
    BathParams bath = cfg.bath;
    sys.g = cfg.g_list[i / n_gamma];
    bath.gamma0 = cfg.gamma0_list[i % n_gamma];
    const auto exact = exact_steady_coherence(sys, bath, cfg.init, exact_opt);
    const auto series = oracle_coherence(sys, bath, cfg.init, cfg.oracle);
    const auto final = series.final_coherence();
    rows[i] = {sys.g,
               bath.gamma0,
               exact.real(),
               exact.imag(),
               final.real(),
               final.imag(),
               std::abs(final - exact),
               series.t.back(),
               series.recurrence_time,
               series.recurrence_warning ? 1.0 : 0.0};
  });

  for (auto& row : rows) {
    table.add_row(std::move(row));
  }
  return table;
}

}  // namespace spinpair
