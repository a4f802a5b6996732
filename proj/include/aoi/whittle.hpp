#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace aoisim {

// Single-terminal relaxation: the shared channel is replaced by a constant
// charge m paid whenever the terminal is scheduled.
struct DecoupledParams {
  double lambda = 1.0;  // arrival rate, in (0, 1]
  double m = 0.0;       // scheduling charge, >= 0
};

// Throws std::invalid_argument when lambda is outside (0, 1] or m < 0.
void validate(const DecoupledParams& params);

// Unique nonnegative root of  beta^2/2 + (1/lambda - 1/2) beta - m = 0.
// Evaluated as 2m / (b + sqrt(b^2 + 2m)) with b = 1/lambda - 1/2, which has no
// cancellation for any m >= 0.
double beta(const DecoupledParams& params);

// Idle/schedule boundary for packet age a: the optimal action is to schedule
// when d >= D_a. Real-valued; integer states are compared against it directly.
double threshold(const DecoupledParams& params, std::int64_t a);

// Optimal average AoI of the decoupled model: 1/lambda + beta.
double optimal_cost(const DecoupledParams& params);

// All thresholds up to a_max, plus beta itself.
struct ThresholdFamily {
  double beta = 0.0;
  std::vector<double> thresholds;  // thresholds[i] = D_{i+1}

  double at(std::int64_t a) const { return thresholds.at(static_cast<std::size_t>(a - 1)); }
};
ThresholdFamily threshold_family(const DecoupledParams& params, std::int64_t a_max);

// Whittle index of state (a, d): the charge m at which scheduling and idling
// are equally attractive. Nonnegative, and zero exactly when d = 0.
double whittle(double lambda, std::int64_t a, std::int64_t d);

struct IndexabilityViolation {
  double m_lo = 0.0;
  double m_hi = 0.0;
  std::int64_t a = 0;
  std::int64_t d = 0;
};

struct IndexabilityReport {
  bool indexable = true;
  bool idle_set_empty_at_zero = true;
  std::optional<IndexabilityViolation> first_violation;
  std::size_t pairs_checked = 0;
};

// Checks, on the truncated grid [1, a_max] x [0, d_max], that the idle sets
// {(a, d) : d < D_a} grow monotonically along an ascending grid of charges,
// and that the idle set at m = 0 is empty. Violations are reported, not
// thrown; a non-ascending m grid is a precondition error.
IndexabilityReport check_indexability(double lambda, std::span<const double> m_grid,
                                      std::int64_t a_max, std::int64_t d_max);

}  // namespace aoisim
