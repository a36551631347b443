// system.hpp - electron-nuclear spin pair parameters and initial state
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace spinpair {

// Two coupled spins, electron quantized along z. The electron flip frequency
// splits into two values, one per nuclear sector; all frequencies are in
// units of the bare electron splitting.
struct SystemParams {
  double omega0 = 1.0;  // bare electron splitting
  double g = 0.0;       // electron-nuclear coupling (z-z)

  double omega_lower() const { return omega0 - 2.0 * g; }  // nuclear sector -
  double omega_upper() const { return omega0 + 2.0 * g; }  // nuclear sector +

  void validate() const {
    if (!(omega0 > 0.0)) {
      throw std::invalid_argument("system: omega0 must be positive");
    }
    if (!(g >= 0.0)) {
      throw std::invalid_argument("system: g must be non-negative");
    }
    if (!(2.0 * g < omega0)) {
      throw std::invalid_argument("system: requires 2 g < omega0");
    }
  }
};

// Nuclear superposition riding on an excited electron: the tracked coherence
// starts at a1 * conj(a2). Defaults give an equal superposition.
struct InitialState {
  std::complex<double> a1 = {1.0 / std::numbers::sqrt2, 0.0};
  std::complex<double> a2 = {1.0 / std::numbers::sqrt2, 0.0};

  std::complex<double> coherence0() const { return a1 * std::conj(a2); }

  void validate() const {
    const double n = std::norm(a1) + std::norm(a2);
    if (std::abs(n - 1.0) > 1e-8) {
      throw std::invalid_argument("init: amplitudes must be normalized");
    }
  }
};

}  // namespace spinpair
