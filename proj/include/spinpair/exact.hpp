// exact.hpp - non-perturbative steady-state nuclear coherence at zero
// temperature via the dressed-state overlap integral
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "spinpair/bath.hpp"
#include "spinpair/quadrature.hpp"
#include "spinpair/system.hpp"

namespace spinpair {

struct ExactOptions {
  quad::QuadratureConfig outer;  // frequency integral over the band
  quad::QuadratureConfig inner;  // self-energy shift inside the integrand

  ExactOptions() {
    inner.abs_tol = 1e-12;
    inner.rel_tol = 1e-12;
  }
};

// Long-time nuclear coherence left after the electron relaxes, for a bath at
// zero temperature:
//
//   c_inf = a1 conj(a2) (1/pi) int_0^inf J(nu)
//           / [D1(nu) D2(nu) + J(nu)^2 - 4 i g J(nu)] dnu,
//
// with Dm(nu) = omega_m - nu - S(nu) and S the Hilbert transform of J. Each
// factor Dm -/+ i J is a dressed resolvent at the sector frequency, so at
// g = 0 the integral is the spectral-function norm and evaluates to exactly
// one. Weak-coupling parameters put no dressed pole outside the band, which
// keeps that normalization argument valid.
inline std::complex<double> exact_steady_coherence(const SystemParams& sys,
                                                   const BathParams& bath,
                                                   const InitialState& init = {},
                                                   const ExactOptions& opt = {}) {
  sys.validate();
  bath.validate();
  init.validate();
  if (!bath.zero_temperature()) {
    throw std::invalid_argument("exact_steady_coherence: bath must be at T = 0");
  }
  if (!(bath.gamma0 > 0.0)) {
    throw std::invalid_argument("exact_steady_coherence: requires gamma0 > 0");
  }
  const double hi = weight_support_upper(bath);
  const double w1 = sys.omega_lower();
  const double w2 = sys.omega_upper();
  auto jw = [&bath](double nu) { return spectral_density(bath, nu); };
  auto shift = [&](double nu) {
    return quad::principal_value(jw, hi, nu, opt.inner, bath.xi_c) /
           std::numbers::pi;
  };
  auto integrand = [&](double nu) {
    const double j = jw(nu);
    const double s = shift(nu);
    const double d1 = w1 - nu - s;
    const double d2 = w2 - nu - s;
    return j / std::complex<double>(d1 * d2 + j * j, -4.0 * sys.g * j);
  };
  const std::vector<double> breaks = {w1, w2, bath.xi_c};
  const std::complex<double> integral =
      quad::integrate_halfline(integrand, hi, opt.outer, breaks) / std::numbers::pi;
  return init.coherence0() * integral;
}

}  // namespace spinpair
