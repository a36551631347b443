// selftest.hpp - structural invariant battery: fast, deterministic checks of
// the properties every other result rests on (conservation laws, detailed
// balance, root identities, oracle unitarity, seeded reproducibility).
#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "spinpair/oracle.hpp"
#include "spinpair/redfield.hpp"
#include "spinpair/rtn.hpp"

namespace spinpair {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline std::string format_value(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

inline CheckResult run_check(const std::string& name,
                             const std::function<std::pair<bool, std::string>()>& body) {
  CheckResult result;
  result.name = name;
  try {
    auto [pass, detail] = body();
    result.pass = pass;
    result.detail = std::move(detail);
  } catch (const std::exception& e) {
    result.pass = false;
    result.detail = std::string("exception: ") + e.what();
  }
  return result;
}

}  // namespace detail

inline std::vector<CheckResult> run_selftest() {
  std::vector<CheckResult> results;
  using detail::format_value;
  using detail::run_check;

  results.push_back(run_check("master equation conserves trace and Hermiticity", [] {
    SystemParams sys;
    sys.g = 0.1;
    BathParams bath;
    bath.inv_temp = 1.0;
    RedfieldOptions opt;
    opt.t_final = 50.0;
    opt.n_samples = 101;
    const auto traj = integrate_redfield(sys, bath, {}, opt);
    const bool pass = traj.trace_drift_max < 1e-10 && traj.hermiticity_max < 1e-10;
    return std::pair{pass, "trace drift " + format_value("%.2e", traj.trace_drift_max) +
                               ", Hermiticity defect " +
                               format_value("%.2e", traj.hermiticity_max)};
  }));

  results.push_back(run_check("transition rates obey detailed balance", [] {
    SystemParams sys;
    sys.g = 0.1;
    BathParams bath;
    bath.inv_temp = 0.7;
    const auto r = transition_rates(sys, bath, RateMode::full);
    const double d1 = std::abs(r.up_lower.real() / r.down_lower.real() -
                               std::exp(-bath.inv_temp * sys.omega_lower()));
    const double d2 = std::abs(r.up_upper.real() / r.down_upper.real() -
                               std::exp(-bath.inv_temp * sys.omega_upper()));
    const double worst = std::max(d1, d2);
    return std::pair{worst < 1e-12, "worst ratio defect " + format_value("%.2e", worst)};
  }));

  results.push_back(run_check("decay-rate roots satisfy sum and product identities", [] {
    SystemParams sys;
    sys.g = 0.1;
    double worst = 0.0;
    for (double b : {std::numeric_limits<double>::infinity(), 1.0, 0.01}) {
      BathParams bath;
      bath.inv_temp = b;
      const auto sol = mqme_coefficients(sys, bath);
      const std::complex<double> x =
          sol.gamma_up_tot + sol.gamma_down_tot - std::complex<double>(0.0, 4.0 * sys.g);
      const std::complex<double> prod = -std::complex<double>(0.0, 4.0 * sys.g) * sol.gamma_up_tot;
      worst = std::max(worst, std::abs(sol.kappa_plus + sol.kappa_minus - x) / std::abs(x));
      if (std::abs(prod) > 0.0) {
        worst = std::max(worst,
                         std::abs(sol.kappa_plus * sol.kappa_minus - prod) / std::abs(prod));
      }
    }
    return std::pair{worst < 1e-12, "worst relative defect " + format_value("%.2e", worst)};
  }));

  results.push_back(run_check("slow and fast rates stay ordered across temperature", [] {
    SystemParams sys;
    sys.g = 0.1;
    bool ordered = true;
    double floor = 0.0;
    for (int i = 0; i < 31; ++i) {
      BathParams bath;
      bath.inv_temp = std::pow(10.0, -3.0 + 5.0 * i / 30.0);
      const auto sol = mqme_coefficients(sys, bath);
      ordered = ordered && (sol.kappa_plus.real() >= sol.kappa_minus.real());
      floor = std::min(floor, sol.kappa_minus.real());
    }
    const bool pass = ordered && floor >= -1e-5;
    return std::pair{pass, "min Re slow rate " + format_value("%.2e", floor)};
  }));

  results.push_back(run_check("total nuclear coherence never exceeds one half", [] {
    SystemParams sys;
    sys.g = 0.1;
    BathParams bath;
    bath.inv_temp = 1.0;
    RedfieldOptions opt;
    opt.t_final = 200.0;
    opt.n_samples = 201;
    const auto traj = integrate_redfield(sys, bath, {}, opt);
    double worst = 0.0;
    for (const auto& rho : traj.rho) {
      const auto blocks = coherence_blocks(rho);
      worst = std::max(worst, std::abs(blocks.lower + blocks.upper));
    }
    return std::pair{worst <= 0.5 + 1e-8, "max |sum| " + format_value("%.12f", worst)};
  }));

  results.push_back(run_check("discretized-bath propagation conserves the norm", [] {
    SystemParams sys;
    sys.g = 0.1;
    BathParams bath;
    bath.gamma0 = 0.05;
    OracleOptions opt;
    opt.n_modes = 1000;
    opt.nu_max = 6.0;
    const auto series = oracle_coherence(sys, bath, {}, opt);
    return std::pair{series.norm_drift_max < 1e-8,
                     "max norm drift " + format_value("%.2e", series.norm_drift_max)};
  }));

  results.push_back(run_check("telegraph ensemble reproduces bit-identically under a seed", [] {
    RtnParams rtn;
    rtn.lam = 1.0;
    rtn.g = 0.1;
    rtn.n_traj = 20000;
    std::vector<double> grid;
    for (int k = 0; k <= 20; ++k) {
      grid.push_back(k * 1.0);
    }
    const auto a = simulate_rtn_ensemble(rtn, grid);
    const auto b = simulate_rtn_ensemble(rtn, grid);
    bool identical = true;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      identical = identical && (a.mean[k] == b.mean[k]);
    }
    return std::pair{identical, identical ? std::string("two runs byte-equal")
                                          : std::string("runs diverged")};
  }));

  results.push_back(run_check("telegraph ensemble stays inside the unit disc", [] {
    RtnParams rtn;
    rtn.lam = 1.0;
    rtn.g = 0.3;
    rtn.n_traj = 20000;
    std::vector<double> grid;
    for (int k = 0; k <= 40; ++k) {
      grid.push_back(k * 0.5);
    }
    const auto ens = simulate_rtn_ensemble(rtn, grid);
    double worst = 0.0;
    for (const auto& m : ens.mean) {
      worst = std::max(worst, std::abs(m));
    }
    return std::pair{worst <= 1.0 + 1e-12, "max modulus " + format_value("%.12f", worst)};
  }));

  return results;
}

}  // namespace spinpair
