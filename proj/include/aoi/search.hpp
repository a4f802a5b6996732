#pragma once

#include <functional>

namespace aoisim {

// Golden-section minimization on [lo, hi]; runs `probes` function evaluations
// and returns the midpoint of the final bracket.
double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          int probes);

struct PlaneSearchResult {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
  bool fallback_grid = false;
  int evaluations = 0;
};

// Minimizes f over [x_lo, x_hi] x [y_lo, y_hi] assuming unimodality: a coarse
// lattice scan followed by golden-section on x with a nested golden-section
// on y. When the refined point is worse than the best lattice point the
// unimodality assumption failed; the lattice point is returned and
// fallback_grid is set. `budget` caps total evaluations.
PlaneSearchResult minimize_unimodal_2d(const std::function<double(double, double)>& f,
                                       double x_lo, double x_hi, double y_lo, double y_hi,
                                       int budget);

}  // namespace aoisim
