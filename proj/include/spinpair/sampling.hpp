// sampling.hpp - uniform sample grids for fixed-step integrators
#pragma once

#include <cmath>
#include <stdexcept>

namespace spinpair::detail {

// n_samples evenly spaced times covering [0, t_final], each separated by a
// whole number of steps; dt is adjusted downward so the grid lands exactly.
struct SampleGrid {
  double dt = 0.0;
  long steps_per_sample = 0;
  int n_samples = 0;
};

inline SampleGrid make_sample_grid(double t_final, double dt, int n_samples) {
  if (!(t_final > 0.0) || !(dt > 0.0) || n_samples < 2) {
    throw std::invalid_argument("sampling: need t_final > 0, dt > 0, n_samples >= 2");
  }
  SampleGrid grid;
  grid.n_samples = n_samples;
  const double span = t_final / (n_samples - 1);
  grid.steps_per_sample = static_cast<long>(std::ceil(span / dt - 1e-12));
  grid.dt = span / static_cast<double>(grid.steps_per_sample);
  return grid;
}

}  // namespace spinpair::detail
