#include "aoi/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace aoisim {

double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          int probes) {
  if (!(hi >= lo)) throw std::invalid_argument("golden_section_min: empty interval");
  if (probes < 2 || hi == lo) return 0.5 * (lo + hi);
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int k = 2; k < probes; ++k) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

PlaneSearchResult minimize_unimodal_2d(const std::function<double(double, double)>& f,
                                       double x_lo, double x_hi, double y_lo, double y_hi,
                                       int budget) {
  if (!(x_hi >= x_lo) || !(y_hi >= y_lo)) {
    throw std::invalid_argument("minimize_unimodal_2d: empty range");
  }
  if (budget < 4) throw std::invalid_argument("minimize_unimodal_2d: budget too small");

  PlaneSearchResult result;
  int evals = 0;
  const auto probe = [&](double x, double y) {
    ++evals;
    return f(x, y);
  };

  // Coarse lattice: both a fallback answer and a sanity anchor.
  const int nx = 4, ny = 4;
  double grid_x = x_lo, grid_y = y_lo, grid_value = 0.0;
  bool have_grid = false;
  for (int i = 0; i < nx; ++i) {
    const double x = nx == 1 ? x_lo : x_lo + (x_hi - x_lo) * i / (nx - 1);
    for (int j = 0; j < ny; ++j) {
      const double y = ny == 1 ? y_lo : y_lo + (y_hi - y_lo) * j / (ny - 1);
      const double v = probe(x, y);
      if (!have_grid || v < grid_value) {
        grid_value = v;
        grid_x = x;
        grid_y = y;
        have_grid = true;
      }
    }
  }

  // Nested golden sections on the remaining budget.
  const int remaining = budget - evals;
  if (remaining < 6) {
    result.x = grid_x;
    result.y = grid_y;
    result.value = grid_value;
    result.evaluations = evals;
    return result;
  }
  const int outer = std::max(2, static_cast<int>(std::sqrt(static_cast<double>(remaining))));
  const int inner = std::max(2, remaining / outer - 1);

  double gs_x = grid_x, gs_y = grid_y;
  double gs_value = std::numeric_limits<double>::infinity();
  const auto line_min = [&](double x) {
    const double y = golden_section_min([&](double yy) { return probe(x, yy); }, y_lo, y_hi, inner);
    const double v = probe(x, y);
    if (v < gs_value) {
      gs_value = v;
      gs_x = x;
      gs_y = y;
    }
    return v;
  };
  golden_section_min(line_min, x_lo, x_hi, outer);

  if (grid_value < gs_value) {
    // The refinement never reached the lattice optimum: not unimodal along
    // the probed lines.
    result.x = grid_x;
    result.y = grid_y;
    result.value = grid_value;
    result.fallback_grid = true;
  } else {
    result.x = gs_x;
    result.y = gs_y;
    result.value = gs_value;
  }
  result.evaluations = evals;
  return result;
}

}  // namespace aoisim
