// bath.hpp - structured bosonic bath: spectral density, occupation, complex
// transition rates with principal-value level shifts
#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "spinpair/quadrature.hpp"

namespace spinpair {

// Spectral density J(nu) = gamma0 (nu/xi_c)^s exp(s (1 - nu/xi_c)), peaked at
// nu = xi_c with peak value gamma0. inv_temp is in inverse frequency units;
// +infinity encodes zero temperature (occupation identically zero).
struct BathParams {
  double gamma0 = 0.02;  // peak coupling rate
  double xi_c = 1.0;     // peak position
  double s_exp = 1.0;    // low-frequency exponent (1 = Ohmic)
  double inv_temp = std::numeric_limits<double>::infinity();

  bool zero_temperature() const { return std::isinf(inv_temp); }

  void validate() const {
    if (!(gamma0 >= 0.0)) {
      throw std::invalid_argument("bath: gamma0 must be non-negative");
    }
    if (!(xi_c > 0.0)) {
      throw std::invalid_argument("bath: xi_c must be positive");
    }
    if (!(s_exp > 0.0)) {
      throw std::invalid_argument("bath: s must be positive");
    }
    if (!(inv_temp > 0.0)) {
      throw std::invalid_argument("bath: inv_temp must be positive (inf = T 0)");
    }
  }
};

// Evaluated in log form so large nu underflows cleanly instead of producing
// inf * 0.
inline double spectral_density(const BathParams& b, double nu) {
  if (!(nu > 0.0)) {
    return 0.0;
  }
  const double r = nu / b.xi_c;
  return b.gamma0 * std::exp(b.s_exp * (std::log(r) + 1.0 - r));
}

inline double bose_occupation(const BathParams& b, double nu) {
  if (b.zero_temperature()) {
    return 0.0;
  }
  return 1.0 / std::expm1(b.inv_temp * nu);
}

// Frequency above which J drops below 1e-14 of its peak; integrals over the
// bath are truncated there.
inline double weight_support_upper(const BathParams& b) {
  const double target = std::log(1e-14) / b.s_exp;  // solve log r + 1 - r = target
  auto fval = [](double r) { return std::log(r) + 1.0 - r; };
  double lo = 1.0;
  double hi = 2.0;
  while (fval(hi) > target) {
    hi *= 2.0;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (fval(mid) > target ? lo : hi) = mid;
  }
  return b.xi_c * 0.5 * (lo + hi);
}

// RMS width of J about its mean frequency; closed form from the moments of
// the normalized shape (a gamma distribution with shape s+1, scale xi_c/s).
inline double spectral_width(const BathParams& b) {
  return b.xi_c / b.s_exp * std::sqrt(b.s_exp + 1.0);
}

// Hilbert transform (1/pi) P-int J(nu) / (nu - omega) dnu; the level-shift
// kernel shared by both rates at zero temperature.
inline double hilbert_of_density(const BathParams& b, double omega,
                                 const quad::QuadratureConfig& cfg = {}) {
  const double hi = weight_support_upper(b);
  auto w = [&b](double nu) { return spectral_density(b, nu); };
  return quad::principal_value(w, hi, omega, cfg, b.xi_c) / std::numbers::pi;
}

// Downward (emission) and upward (absorption) complex rates at a transition
// frequency. Real parts are golden-rule rates; imaginary parts are the
// principal-value shifts, entering with opposite signs.
struct ComplexRatePair {
  std::complex<double> down;  // emission: J (n+1) - i shift
  std::complex<double> up;    // absorption: J n + i shift
};

inline ComplexRatePair gamma_rates(const BathParams& b, const double omega,
                                   const quad::QuadratureConfig& cfg = {}) {
  if (!(omega > 0.0)) {
    throw std::invalid_argument("gamma_rates: requires omega > 0");
  }
  const double hi = weight_support_upper(b);
  const double j = spectral_density(b, omega);
  if (b.zero_temperature()) {
    const double shift = hilbert_of_density(b, omega, cfg);
    return {{j, -shift}, {0.0, 0.0}};
  }
  auto emission = [&b](double nu) {
    return spectral_density(b, nu) * (bose_occupation(b, nu) + 1.0);
  };
  auto absorption = [&b](double nu) {
    return spectral_density(b, nu) * bose_occupation(b, nu);
  };
  const double n = bose_occupation(b, omega);
  const double pv_down =
      quad::principal_value(emission, hi, omega, cfg, b.xi_c) / std::numbers::pi;
  const double pv_up =
      quad::principal_value(absorption, hi, omega, cfg, b.xi_c) / std::numbers::pi;
  return {{j * (n + 1.0), -pv_down}, {j * n, pv_up}};
}

// Laplace-domain bath correlation f(z) = (1/pi) int_0^inf J(nu) / (z + i nu)
// dnu, defined for Re z > 0. On the boundary z -> 0+ - i omega it reproduces
// the zero-temperature emission rate, which is how the two conventions are
// cross-checked.
inline std::complex<double> f_laplace(const BathParams& b, std::complex<double> z,
                                      const quad::QuadratureConfig& cfg = {}) {
  if (!(z.real() > 0.0)) {
    throw std::invalid_argument("f_laplace: requires Re z > 0");
  }
  const double hi = weight_support_upper(b);
  auto f = [&b, z](double nu) {
    return spectral_density(b, nu) / (z + std::complex<double>(0.0, nu));
  };
  // The integrand peaks near nu = -Im z with width Re z; seed panels there.
  std::vector<double> breaks;
  const double nu_star = -z.imag();
  if (nu_star > 0.0 && nu_star < hi) {
    const double w = std::max(z.real(), 1e-3 * b.xi_c);
    for (double x : {nu_star - 10.0 * w, nu_star - w, nu_star, nu_star + w,
                     nu_star + 10.0 * w}) {
      if (x > 0.0 && x < hi) {
        breaks.push_back(x);
      }
    }
  }
  return quad::integrate_halfline(f, hi, cfg, breaks) / std::numbers::pi;
}

}  // namespace spinpair
