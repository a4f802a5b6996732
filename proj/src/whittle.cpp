#include "aoi/whittle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aoisim {

void validate(const DecoupledParams& params) {
  if (!(params.lambda > 0.0) || params.lambda > 1.0 || !std::isfinite(params.lambda)) {
    throw std::invalid_argument("DecoupledParams: lambda must be in (0, 1], got " +
                                std::to_string(params.lambda));
  }
  if (!(params.m >= 0.0) || !std::isfinite(params.m)) {
    throw std::invalid_argument("DecoupledParams: m must be >= 0, got " +
                                std::to_string(params.m));
  }
}

double beta(const DecoupledParams& params) {
  validate(params);
  if (params.m == 0.0) return 0.0;
  const double b = 1.0 / params.lambda - 0.5;
  return 2.0 * params.m / (b + std::sqrt(b * b + 2.0 * params.m));
}

double threshold(const DecoupledParams& params, std::int64_t a) {
  if (a < 1) throw std::invalid_argument("threshold: a must be >= 1");
  const double root = beta(params);
  const double ad = static_cast<double>(a);
  if (ad < root) {
    return (1.0 - params.lambda + ad * params.lambda) * root -
           params.lambda * 0.5 * (ad - 1.0) * ad;
  }
  return params.lambda * params.m;
}

double optimal_cost(const DecoupledParams& params) {
  return 1.0 / params.lambda + beta(params);
}

ThresholdFamily threshold_family(const DecoupledParams& params, std::int64_t a_max) {
  if (a_max < 1) throw std::invalid_argument("threshold_family: a_max must be >= 1");
  ThresholdFamily fam;
  fam.beta = beta(params);
  fam.thresholds.reserve(static_cast<std::size_t>(a_max));
  for (std::int64_t a = 1; a <= a_max; ++a) fam.thresholds.push_back(threshold(params, a));
  return fam;
}

double whittle(double lambda, std::int64_t a, std::int64_t d) {
  validate(DecoupledParams{lambda, 0.0});
  if (a < 1 || d < 0) throw std::invalid_argument("whittle: need a >= 1 and d >= 0");
  const double ad = static_cast<double>(a);
  const double dd = static_cast<double>(d);
  const double boundary = 0.5 * lambda * ad * ad + (1.0 - 0.5 * lambda) * ad;
  if (dd > boundary) {
    const double x = (dd + 0.5 * ad * (ad - 1.0) * lambda) / (1.0 - lambda + ad * lambda);
    return 0.5 * x * x + (1.0 / lambda - 0.5) * x;
  }
  return dd / lambda;
}

IndexabilityReport check_indexability(double lambda, std::span<const double> m_grid,
                                      std::int64_t a_max, std::int64_t d_max) {
  if (a_max < 1 || d_max < 1) {
    throw std::invalid_argument("check_indexability: grid bounds must be >= 1");
  }
  for (std::size_t i = 1; i < m_grid.size(); ++i) {
    if (!(m_grid[i] > m_grid[i - 1])) {
      throw std::invalid_argument("check_indexability: m_grid must be strictly ascending");
    }
  }

  IndexabilityReport report;

  // Pi_0 must be empty: every threshold is zero at m = 0, so no d < D_a.
  {
    const ThresholdFamily at_zero = threshold_family({lambda, 0.0}, a_max);
    for (std::int64_t a = 1; a <= a_max && report.idle_set_empty_at_zero; ++a) {
      if (0.0 < at_zero.at(a)) report.idle_set_empty_at_zero = false;
    }
    report.indexable = report.idle_set_empty_at_zero;
  }

  ThresholdFamily prev;
  bool have_prev = false;
  double prev_m = 0.0;
  for (const double m : m_grid) {
    ThresholdFamily cur = threshold_family({lambda, m}, a_max);
    if (have_prev) {
      for (std::int64_t a = 1; a <= a_max; ++a) {
        for (std::int64_t d = 0; d <= d_max; ++d) {
          const bool idle_lo = static_cast<double>(d) < prev.at(a);
          const bool idle_hi = static_cast<double>(d) < cur.at(a);
          if (idle_lo && !idle_hi) {
            report.indexable = false;
            if (!report.first_violation) {
              report.first_violation = IndexabilityViolation{prev_m, m, a, d};
            }
          }
        }
      }
      ++report.pairs_checked;
    }
    prev = std::move(cur);
    prev_m = m;
    have_prev = true;
  }
  return report;
}

}  // namespace aoisim
