// rtn.hpp - semiclassical telegraph-noise model of nuclear dephasing: the
// electron is replaced by a classical two-state process flipping at the
// thermal rate, so the nuclear frequency wanders between +-2g. Provides the
// exact ensemble-averaged coherence, the motional-narrowing decay rates, and
// a Monte Carlo trajectory ensemble with batch statistics as an independent
// check on both.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spinpair/bath.hpp"
#include "spinpair/system.hpp"

namespace spinpair {

struct RtnParams {
  double lam = 1.0;             // symmetric flip rate of the telegraph process
  double g = 0.1;               // half-excursion: the frequency takes +-2g
  long n_traj = 100000;         // Monte Carlo ensemble size
  std::uint64_t seed = 12345;   // base seed; trajectories get derived streams

  void validate() const {
    if (!(lam > 0.0)) {
      throw std::invalid_argument("RtnParams: flip rate must be positive");
    }
    if (!(g >= 0.0)) {
      throw std::invalid_argument("RtnParams: coupling must be non-negative");
    }
    if (n_traj < 1) {
      throw std::invalid_argument("RtnParams: need at least one trajectory");
    }
  }
};

// Thermal flip rate of the electron seen as a classical fluctuator: twice the
// absorption rate at the bare electron frequency. The nuclear splitting 4g is
// negligible against the thermal scale wherever this model applies, so the
// rate is evaluated at omega0 rather than per sector.
inline double flip_rate(const SystemParams& sys, const BathParams& bath) {
  if (bath.zero_temperature()) {
    throw std::domain_error(
        "flip_rate: an empty bath never excites the electron; the telegraph "
        "model needs finite temperature");
  }
  return 2.0 * spectral_density(bath, sys.omega0) * bose_occupation(bath, sys.omega0);
}

// Leading motional-narrowing decay rate of the nuclear coherence, 2g^2/lam.
inline double kappa_sc_leading(double lam, double g) {
  if (!(lam > 0.0)) {
    throw std::domain_error("kappa_sc_leading: flip rate must be positive");
  }
  return 2.0 * g * g / lam;
}

// Fourth-order-corrected decay rate. The exact long-time rate of the
// telegraph-averaged coherence is lam - sqrt(lam^2 - 4g^2), whose expansion
// is (2g^2/lam) * (1 + (g/lam)^2 + 2(g/lam)^4 + ...): the quartic term
// speeds the decay up, it does not slow it down.
inline double kappa_sc(double lam, double g) {
  if (!(lam > 0.0) || !(g < lam)) {
    throw std::domain_error("kappa_sc: expansion requires 0 < g < lam");
  }
  const double r = g / lam;
  return 2.0 * g * g / lam * (1.0 + r * r);
}

// Past this ratio the quartic correction exceeds ~10% and the exponential
// picture itself starts to strain; callers should warn.
inline constexpr double kKappaScStrainRatio = 0.3;

inline bool kappa_sc_strained(double lam, double g) { return g > kKappaScStrainRatio * lam; }

// Exact ensemble-averaged coherence of the symmetric telegraph process with
// equal +-2g start probabilities:
//
//   C(t) = e^{-lam t} [cosh(mu t) + (lam/mu) sinh(mu t)],  mu = sqrt(lam^2-4g^2)
//
// evaluated through exponential splits so neither overflow nor the mu -> 0
// degeneracy loses accuracy. For 2g > lam, mu is imaginary and the hyperbolic
// pair turns trigonometric (damped ringing instead of biexponential decay).
inline double rtn_coherence_exact(double lam, double g, double t) {
  if (!(lam > 0.0) || !(t >= 0.0)) {
    throw std::domain_error("rtn_coherence_exact: need lam > 0 and t >= 0");
  }
  const double disc = lam * lam - 4.0 * g * g;
  if (std::abs(disc) * t * t < 1e-10) {
    // Degenerate point 2g = lam: C = e^{-lam t}(1 + lam t), plus the leading
    // correction in mu^2 t^2 so the branches join smoothly.
    return std::exp(-lam * t) * (1.0 + lam * t + disc * t * t * (0.5 + lam * t / 6.0));
  }
  if (disc > 0.0) {
    const double mu = std::sqrt(disc);
    return 0.5 * ((1.0 + lam / mu) * std::exp(-(lam - mu) * t) +
                  (1.0 - lam / mu) * std::exp(-(lam + mu) * t));
  }
  const double nu = std::sqrt(-disc);
  return std::exp(-lam * t) * (std::cos(nu * t) + (lam / nu) * std::sin(nu * t));
}

namespace detail {

// splitmix64 finalizer: a strong 64-bit mix.
inline std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Counter-based generator: each (seed, stream) pair starts from a hashed
// state and walks it by the golden-ratio increment, so per-trajectory
// streams are independent and the ensemble is reproducible no matter how
// the trajectory loop is scheduled.
class SplitMix64 {
 public:
  SplitMix64(std::uint64_t seed, std::uint64_t stream)
      : state_(mix64(seed + 0x9E3779B97F4A7C15ull * (stream + 1))) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // Uniform on (0, 1]: never returns 0, so logarithms are safe.
  double uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  bool coin() { return (next() >> 63) != 0; }

 private:
  std::uint64_t state_;
};

inline void check_time_grid(const std::vector<double>& t) {
  if (t.empty()) {
    throw std::invalid_argument("rtn: time grid is empty");
  }
  double prev = 0.0;
  for (double v : t) {
    if (!(v >= prev)) {
      throw std::invalid_argument("rtn: time grid must be sorted and non-negative");
    }
    prev = v;
  }
}

// Contiguous batch boundaries: batch b owns [bounds[b], bounds[b+1]).
inline std::vector<long> batch_bounds(long n, int n_batches) {
  std::vector<long> bounds(n_batches + 1);
  for (int b = 0; b <= n_batches; ++b) {
    bounds[b] = static_cast<long>((static_cast<long long>(n) * b) / n_batches);
  }
  return bounds;
}

}  // namespace detail

// Fixed number of batches for standard-error estimation.
inline constexpr int kRtnBatchCount = 20;

struct RtnEnsemble {
  std::vector<double> t;
  std::vector<std::complex<double>> mean;  // ensemble average of e^{i phase}
  std::vector<double> se_re, se_im;        // standard errors from batch scatter
  // batch_means[b][k]: average over batch b at time t[k]
  std::vector<std::vector<std::complex<double>>> batch_means;
};

// Monte Carlo average of exp(i * integral of the telegraph frequency). The
// phase is accumulated exactly over each constant segment, so time enters
// only through the requested grid. Trajectory i always consumes stream i of
// the seed, making the result bit-identical across runs.
inline RtnEnsemble simulate_rtn_ensemble(const RtnParams& rtn, const std::vector<double>& t_grid) {
  rtn.validate();
  detail::check_time_grid(t_grid);

  const int n_batches = static_cast<int>(std::min<long>(kRtnBatchCount, rtn.n_traj));
  const auto bounds = detail::batch_bounds(rtn.n_traj, n_batches);
  const std::size_t n_t = t_grid.size();

  RtnEnsemble out;
  out.t = t_grid;
  out.batch_means.assign(n_batches, std::vector<std::complex<double>>(n_t));

  for (int b = 0; b < n_batches; ++b) {
    std::vector<std::complex<double>> acc(n_t, {0.0, 0.0});
    for (long i = bounds[b]; i < bounds[b + 1]; ++i) {
      detail::SplitMix64 rng(rtn.seed, static_cast<std::uint64_t>(i));
      double sign = rng.coin() ? 1.0 : -1.0;
      double t_cur = 0.0;
      double t_switch = rng.exponential(rtn.lam);
      double phase = 0.0;
      std::size_t k = 0;
      while (k < n_t) {
        if (t_grid[k] <= t_switch) {
          const double ph = phase + sign * 2.0 * rtn.g * (t_grid[k] - t_cur);
          acc[k] += std::complex<double>(std::cos(ph), std::sin(ph));
          ++k;
        } else {
          phase += sign * 2.0 * rtn.g * (t_switch - t_cur);
          t_cur = t_switch;
          t_switch += rng.exponential(rtn.lam);
          sign = -sign;
        }
      }
    }
    const double inv = 1.0 / static_cast<double>(bounds[b + 1] - bounds[b]);
    for (std::size_t k = 0; k < n_t; ++k) {
      out.batch_means[b][k] = acc[k] * inv;
    }
  }

  out.mean.assign(n_t, {0.0, 0.0});
  for (int b = 0; b < n_batches; ++b) {
    const double w = static_cast<double>(bounds[b + 1] - bounds[b]) / static_cast<double>(rtn.n_traj);
    for (std::size_t k = 0; k < n_t; ++k) {
      out.mean[k] += w * out.batch_means[b][k];
    }
  }

  out.se_re.assign(n_t, 0.0);
  out.se_im.assign(n_t, 0.0);
  if (n_batches > 1) {
    for (std::size_t k = 0; k < n_t; ++k) {
      double vr = 0.0, vi = 0.0;
      for (int b = 0; b < n_batches; ++b) {
        const auto d = out.batch_means[b][k] - out.mean[k];
        vr += d.real() * d.real();
        vi += d.imag() * d.imag();
      }
      out.se_re[k] = std::sqrt(vr / (n_batches - 1) / n_batches);
      out.se_im[k] = std::sqrt(vi / (n_batches - 1) / n_batches);
    }
  }
  return out;
}

struct DecayFit {
  double rate = 0.0;  // fitted exponential decay rate of |C|
  double se = 0.0;    // standard error across batches
  int n_points = 0;   // grid points inside the fit window
};

// Exponential-rate extraction: within [t_lo, t_hi], fit -log|C_b(t)| by least
// squares separately on every batch, then report the across-batch mean and
// standard error. Fitting per batch keeps the error estimate honest in the
// presence of the time correlations every trajectory induces along its row.
inline DecayFit fit_decay_rate(const RtnEnsemble& ens, double t_lo, double t_hi) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < ens.t.size(); ++k) {
    if (ens.t[k] >= t_lo && ens.t[k] <= t_hi) {
      idx.push_back(k);
    }
  }
  const int n_batches = static_cast<int>(ens.batch_means.size());
  if (idx.size() < 2 || n_batches < 2) {
    throw std::invalid_argument("fit_decay_rate: need >= 2 points in window and >= 2 batches");
  }

  std::vector<double> slope(n_batches);
  for (int b = 0; b < n_batches; ++b) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k : idx) {
      const double m = std::abs(ens.batch_means[b][k]);
      if (!(m > 0.0)) {
        throw std::runtime_error("fit_decay_rate: batch mean vanished inside the fit window");
      }
      const double x = ens.t[k];
      const double y = -std::log(m);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(idx.size());
    slope[b] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }

  DecayFit fit;
  fit.n_points = static_cast<int>(idx.size());
  for (double s : slope) {
    fit.rate += s;
  }
  fit.rate /= n_batches;
  double var = 0.0;
  for (double s : slope) {
    var += (s - fit.rate) * (s - fit.rate);
  }
  fit.se = std::sqrt(var / (n_batches - 1) / n_batches);
  return fit;
}

struct CorrelatorSeries {
  std::vector<double> lag;
  std::vector<double> value;
  std::vector<double> se;
};

// Exact two-point frequency correlator <w(0) w(tau)> = 4g^2 e^{-2 lam tau}.
inline double rtn_two_point_exact(const RtnParams& rtn, double lag) {
  return 4.0 * rtn.g * rtn.g * std::exp(-2.0 * rtn.lam * lag);
}

// Monte Carlo two-point correlator on a sorted lag grid.
inline CorrelatorSeries rtn_two_point(const RtnParams& rtn, const std::vector<double>& lags) {
  rtn.validate();
  detail::check_time_grid(lags);

  const int n_batches = static_cast<int>(std::min<long>(kRtnBatchCount, rtn.n_traj));
  const auto bounds = detail::batch_bounds(rtn.n_traj, n_batches);
  const std::size_t n_l = lags.size();
  const double w2 = 4.0 * rtn.g * rtn.g;

  std::vector<std::vector<double>> batch(n_batches, std::vector<double>(n_l, 0.0));
  for (int b = 0; b < n_batches; ++b) {
    for (long i = bounds[b]; i < bounds[b + 1]; ++i) {
      detail::SplitMix64 rng(rtn.seed, static_cast<std::uint64_t>(i));
      const double s0 = rng.coin() ? 1.0 : -1.0;
      double sign = s0;
      double t_switch = rng.exponential(rtn.lam);
      for (std::size_t k = 0; k < n_l; ++k) {
        while (t_switch < lags[k]) {
          t_switch += rng.exponential(rtn.lam);
          sign = -sign;
        }
        batch[b][k] += w2 * s0 * sign;
      }
    }
    const double inv = 1.0 / static_cast<double>(bounds[b + 1] - bounds[b]);
    for (std::size_t k = 0; k < n_l; ++k) {
      batch[b][k] *= inv;
    }
  }

  CorrelatorSeries out;
  out.lag = lags;
  out.value.assign(n_l, 0.0);
  out.se.assign(n_l, 0.0);
  for (int b = 0; b < n_batches; ++b) {
    const double w = static_cast<double>(bounds[b + 1] - bounds[b]) / static_cast<double>(rtn.n_traj);
    for (std::size_t k = 0; k < n_l; ++k) {
      out.value[k] += w * batch[b][k];
    }
  }
  if (n_batches > 1) {
    for (std::size_t k = 0; k < n_l; ++k) {
      double var = 0.0;
      for (int b = 0; b < n_batches; ++b) {
        var += (batch[b][k] - out.value[k]) * (batch[b][k] - out.value[k]);
      }
      out.se[k] = std::sqrt(var / (n_batches - 1) / n_batches);
    }
  }
  return out;
}

struct ValueWithError {
  double value = 0.0;
  double se = 0.0;
};

// Exact time-ordered four-point correlator: for s1 <= s2 <= s3 <= s4 the
// middle interval drops out and <w1 w2 w3 w4> = 16 g^4 e^{-2 lam [(s2-s1)+(s4-s3)]}.
inline double rtn_four_point_exact(const RtnParams& rtn, double s1, double s2, double s3,
                                   double s4) {
  const double g2 = rtn.g * rtn.g;
  return 16.0 * g2 * g2 * std::exp(-2.0 * rtn.lam * ((s2 - s1) + (s4 - s3)));
}

// Monte Carlo time-ordered four-point correlator at fixed times.
inline ValueWithError rtn_four_point(const RtnParams& rtn, double s1, double s2, double s3,
                                     double s4) {
  rtn.validate();
  if (!(0.0 <= s1 && s1 <= s2 && s2 <= s3 && s3 <= s4)) {
    throw std::invalid_argument("rtn_four_point: times must be ordered and non-negative");
  }
  const std::vector<double> times = {s1, s2, s3, s4};

  const int n_batches = static_cast<int>(std::min<long>(kRtnBatchCount, rtn.n_traj));
  const auto bounds = detail::batch_bounds(rtn.n_traj, n_batches);
  const double g2 = rtn.g * rtn.g;

  std::vector<double> batch(n_batches, 0.0);
  for (int b = 0; b < n_batches; ++b) {
    for (long i = bounds[b]; i < bounds[b + 1]; ++i) {
      detail::SplitMix64 rng(rtn.seed, static_cast<std::uint64_t>(i));
      double sign = rng.coin() ? 1.0 : -1.0;
      double t_switch = rng.exponential(rtn.lam);
      double prod = 16.0 * g2 * g2;
      for (double s : times) {
        while (t_switch < s) {
          t_switch += rng.exponential(rtn.lam);
          sign = -sign;
        }
        prod *= sign;
      }
      batch[b] += prod;
    }
    batch[b] /= static_cast<double>(bounds[b + 1] - bounds[b]);
  }

  ValueWithError out;
  for (int b = 0; b < n_batches; ++b) {
    out.value += batch[b] * static_cast<double>(bounds[b + 1] - bounds[b]) /
                 static_cast<double>(rtn.n_traj);
  }
  if (n_batches > 1) {
    double var = 0.0;
    for (int b = 0; b < n_batches; ++b) {
      var += (batch[b] - out.value) * (batch[b] - out.value);
    }
    out.se = std::sqrt(var / (n_batches - 1) / n_batches);
  }
  return out;
}

}  // namespace spinpair
