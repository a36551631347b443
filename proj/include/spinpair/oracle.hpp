// oracle.hpp - brute-force reference dynamics: one excitation shared between
// the electron and a discretized bath, integrated per nuclear sector
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "spinpair/bath.hpp"
#include "spinpair/sampling.hpp"
#include "spinpair/system.hpp"

namespace spinpair {

struct OracleOptions {
  int n_modes = 4000;
  double nu_max = 10.0;
  double t_final = 0.0;   // <= 0: auto, 12 / gamma0
  double dt = 0.0;        // <= 0: auto, 0.05 / max(nu_max, omega0)
  int n_samples = 201;
  double norm_tol = 1e-6;  // unitarity guard per sector
};

// Midpoint grid over [0, nu_max]; couplings reproduce J as the amplitude
// decay rate in the continuum limit.
struct DiscretizedBath {
  std::vector<double> nu;
  std::vector<double> c;
  double dnu = 0.0;

  double recurrence_time() const { return 2.0 * std::numbers::pi / dnu; }
};

inline DiscretizedBath discretize_bath(const BathParams& b, int n_modes,
                                       double nu_max) {
  if (n_modes < 1 || !(nu_max > 0.0)) {
    throw std::invalid_argument("discretize_bath: need n_modes >= 1, nu_max > 0");
  }
  DiscretizedBath out;
  out.dnu = nu_max / n_modes;
  out.nu.resize(n_modes);
  out.c.resize(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    out.nu[k] = (k + 0.5) * out.dnu;
    out.c[k] = std::sqrt(spectral_density(b, out.nu[k]) * out.dnu / std::numbers::pi);
  }
  return out;
}

// Integrates a(t), alpha_k(t) for one nuclear sector in the interaction
// picture:
//   da/dt      = -i sum_k c_k exp(+i (omega - nu_k) t) alpha_k
//   dalpha_k/dt = -i c_k exp(-i (omega - nu_k) t) a
// Classic fourth-order Runge-Kutta; stage phases advance by cached per-mode
// half-step rotators and are recomputed from scratch periodically so phase
// drift cannot accumulate over long runs.
class SectorStepper {
 public:
  SectorStepper(double omega, std::complex<double> a0, const DiscretizedBath& bath,
                double dt)
      : omega_(omega),
        dt_(dt),
        nu_(bath.nu),
        c_(bath.c),
        a_(a0),
        alpha_(bath.nu.size()),
        phase_(bath.nu.size()),
        rot_(bath.nu.size()),
        ph_half_(bath.nu.size()),
        ph_full_(bath.nu.size()),
        k1_(bath.nu.size()),
        k2_(bath.nu.size()),
        k3_(bath.nu.size()),
        k4_(bath.nu.size()),
        tmp_(bath.nu.size()) {
    if (!(dt > 0.0)) {
      throw std::invalid_argument("SectorStepper: dt must be positive");
    }
    for (std::size_t k = 0; k < nu_.size(); ++k) {
      rot_[k] = std::polar(1.0, (omega_ - nu_[k]) * 0.5 * dt_);
    }
    refresh_phases();
  }

  void step() {
    const std::size_t n = alpha_.size();
    for (std::size_t k = 0; k < n; ++k) {
      ph_half_[k] = phase_[k] * rot_[k];
      ph_full_[k] = ph_half_[k] * rot_[k];
    }
    const std::complex<double> ka1 = deriv(a_, alpha_, phase_, k1_);
    axpy(0.5 * dt_, k1_, alpha_, tmp_);
    const std::complex<double> ka2 = deriv(a_ + 0.5 * dt_ * ka1, tmp_, ph_half_, k2_);
    axpy(0.5 * dt_, k2_, alpha_, tmp_);
    const std::complex<double> ka3 = deriv(a_ + 0.5 * dt_ * ka2, tmp_, ph_half_, k3_);
    axpy(dt_, k3_, alpha_, tmp_);
    const std::complex<double> ka4 = deriv(a_ + dt_ * ka3, tmp_, ph_full_, k4_);
    const double w = dt_ / 6.0;
    a_ += w * (ka1 + 2.0 * (ka2 + ka3) + ka4);
    for (std::size_t k = 0; k < n; ++k) {
      alpha_[k] += w * (k1_[k] + 2.0 * (k2_[k] + k3_[k]) + k4_[k]);
    }
    ++steps_;
    if (steps_ % kPhaseRefresh == 0) {
      refresh_phases();
    } else {
      std::swap(phase_, ph_full_);
    }
  }

  double time() const { return static_cast<double>(steps_) * dt_; }
  std::complex<double> excited() const { return a_; }
  const std::vector<std::complex<double>>& modes() const { return alpha_; }

  double norm() const {
    double n = std::norm(a_);
    for (const auto& v : alpha_) {
      n += std::norm(v);
    }
    return n;
  }

 private:
  static constexpr long kPhaseRefresh = 8192;

  void refresh_phases() {
    const double t = time();
    for (std::size_t k = 0; k < nu_.size(); ++k) {
      phase_[k] = std::polar(1.0, (omega_ - nu_[k]) * t);
    }
  }

  std::complex<double> deriv(std::complex<double> a_in,
                             const std::vector<std::complex<double>>& al,
                             const std::vector<std::complex<double>>& ph,
                             std::vector<std::complex<double>>& dal) const {
    std::complex<double> acc{0.0, 0.0};
    const std::size_t n = al.size();
    for (std::size_t k = 0; k < n; ++k) {
      acc += c_[k] * ph[k] * al[k];
      dal[k] = std::complex<double>(0.0, -1.0) * (c_[k] * a_in) * std::conj(ph[k]);
    }
    return std::complex<double>(0.0, -1.0) * acc;
  }

  static void axpy(double s, const std::vector<std::complex<double>>& x,
                   const std::vector<std::complex<double>>& y,
                   std::vector<std::complex<double>>& out) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      out[k] = y[k] + s * x[k];
    }
  }

  double omega_;
  double dt_;
  const std::vector<double>& nu_;
  const std::vector<double>& c_;
  std::complex<double> a_;
  std::vector<std::complex<double>> alpha_;
  std::vector<std::complex<double>> phase_;
  std::vector<std::complex<double>> rot_;
  std::vector<std::complex<double>> ph_half_;
  std::vector<std::complex<double>> ph_full_;
  std::vector<std::complex<double>> k1_, k2_, k3_, k4_, tmp_;
  long steps_ = 0;
};

struct SectorTrajectory {
  std::vector<double> t;
  std::vector<std::complex<double>> a;  // excited amplitude at the samples
  double norm_drift_max = 0.0;
};

namespace detail {

inline void apply_defaults(OracleOptions& opt, const SystemParams& sys,
                           const BathParams& bath) {
  if (opt.t_final <= 0.0) {
    if (!(bath.gamma0 > 0.0)) {
      throw std::invalid_argument("oracle: t_final must be set when gamma0 = 0");
    }
    opt.t_final = 12.0 / bath.gamma0;
  }
  if (opt.dt <= 0.0) {
    opt.dt = 0.05 / std::max(opt.nu_max, sys.omega0);
  }
}

}  // namespace detail

// One sector on its own; used for envelope studies and unitarity checks.
inline SectorTrajectory propagate_sector(double omega, std::complex<double> a0,
                                         const BathParams& bath,
                                         const SystemParams& sys,
                                         OracleOptions opt = {}) {
  bath.validate();
  detail::apply_defaults(opt, sys, bath);
  const auto grid = detail::make_sample_grid(opt.t_final, opt.dt, opt.n_samples);
  const auto modes = discretize_bath(bath, opt.n_modes, opt.nu_max);
  SectorStepper stepper(omega, a0, modes, grid.dt);
  SectorTrajectory out;
  const double norm0 = stepper.norm();
  for (int s = 0; s < grid.n_samples; ++s) {
    out.t.push_back(stepper.time());
    out.a.push_back(stepper.excited());
    out.norm_drift_max =
        std::max(out.norm_drift_max, std::abs(stepper.norm() - norm0));
    if (out.norm_drift_max > opt.norm_tol) {
      throw std::runtime_error("oracle: unitarity drift exceeded norm_tol");
    }
    if (s + 1 < grid.n_samples) {
      for (long i = 0; i < grid.steps_per_sample; ++i) {
        stepper.step();
      }
    }
  }
  return out;
}

struct OracleSeries {
  std::vector<double> t;
  std::vector<std::complex<double>> ground;   // sum_k alpha1_k conj(alpha2_k)
  std::vector<std::complex<double>> excited;  // a1 conj(a2)
  double recurrence_time = 0.0;
  bool recurrence_warning = false;
  double norm_drift_max = 0.0;

  std::complex<double> final_coherence() const { return ground.back(); }
};

// Both sectors in lockstep; the nuclear coherence splits into an excited part
// a1 conj(a2) and a ground part summed over bath modes. Only a vacuum bath is
// representable, so finite temperature is rejected.
inline OracleSeries oracle_coherence(const SystemParams& sys, const BathParams& bath,
                                     const InitialState& init = {},
                                     OracleOptions opt = {}) {
  sys.validate();
  bath.validate();
  init.validate();
  if (!bath.zero_temperature()) {
    throw std::invalid_argument("oracle_coherence: bath must be at T = 0");
  }
  detail::apply_defaults(opt, sys, bath);
  const auto grid = detail::make_sample_grid(opt.t_final, opt.dt, opt.n_samples);
  const auto modes = discretize_bath(bath, opt.n_modes, opt.nu_max);

  OracleSeries out;
  out.recurrence_time = modes.recurrence_time();
  out.recurrence_warning = opt.t_final > 0.5 * out.recurrence_time;

  SectorStepper lower(sys.omega_lower(), init.a1, modes, grid.dt);
  SectorStepper upper(sys.omega_upper(), init.a2, modes, grid.dt);
  const double norm_lo = lower.norm();
  const double norm_up = upper.norm();
  for (int s = 0; s < grid.n_samples; ++s) {
    out.t.push_back(lower.time());
    std::complex<double> acc{0.0, 0.0};
    const auto& alpha_lo = lower.modes();
    const auto& alpha_up = upper.modes();
    for (std::size_t k = 0; k < alpha_lo.size(); ++k) {
      acc += alpha_lo[k] * std::conj(alpha_up[k]);
    }
    out.ground.push_back(acc);
    out.excited.push_back(lower.excited() * std::conj(upper.excited()));
    const double drift = std::max(std::abs(lower.norm() - norm_lo),
                                  std::abs(upper.norm() - norm_up));
    out.norm_drift_max = std::max(out.norm_drift_max, drift);
    if (out.norm_drift_max > opt.norm_tol) {
      throw std::runtime_error("oracle: unitarity drift exceeded norm_tol");
    }
    if (s + 1 < grid.n_samples) {
      // The sectors never exchange data between samples, so stepping them on
      // two threads is bitwise identical to stepping them in sequence.
      std::thread side([&upper, &grid]() {
        for (long i = 0; i < grid.steps_per_sample; ++i) {
          upper.step();
        }
      });
      for (long i = 0; i < grid.steps_per_sample; ++i) {
        lower.step();
      }
      side.join();
    }
  }
  return out;
}

}  // namespace spinpair
