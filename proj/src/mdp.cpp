#include "aoi/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "aoi/csv.hpp"

namespace aoisim {

namespace {

// Ties between the branches count as scheduling when extracting thresholds;
// the margin only has to absorb rounding noise of the converged table.
double tie_eps(const DecoupledParams& params) { return 1e-9 * std::max(1.0, params.m); }

}  // namespace

void validate(const TruncationSpec& trunc) {
  if (trunc.a_max < 2 || trunc.d_max < 2) {
    throw std::invalid_argument("TruncationSpec: a_max and d_max must be >= 2");
  }
  if (!(trunc.tol > 0.0)) throw std::invalid_argument("TruncationSpec: tol must be > 0");
  if (trunc.max_iters < 1) throw std::invalid_argument("TruncationSpec: max_iters must be >= 1");
}

std::pair<double, double> DecoupledTable::branch_values(std::int64_t a, std::int64_t d) const {
  const double lam = params.lambda;
  const std::int64_t a_up = std::min(a + 1, trunc.a_max);
  const std::int64_t da = std::min(d + a, trunc.d_max);
  const double idle = static_cast<double>(d + a) + (1.0 - lam) * f_at(a_up, d) +
                      lam * f_at(1, da);
  const double sched = static_cast<double>(a) + params.m + (1.0 - lam) * f_at(a_up, 0) +
                       lam * f_at(1, std::min(a, trunc.d_max));
  return {idle, sched};
}

DecoupledTable solve_decoupled(const DecoupledParams& params, const TruncationSpec& trunc) {
  validate(params);
  validate(trunc);

  const std::int64_t A = trunc.a_max;
  const std::int64_t D = trunc.d_max;
  const std::size_t n_states = static_cast<std::size_t>(A * (D + 1));
  const double lam = params.lambda;
  const double m = params.m;

  DecoupledTable table;
  table.params = params;
  table.trunc = trunc;
  table.f.assign(n_states, 0.0);
  std::vector<double> next(n_states, 0.0);

  const auto idx = [D](std::int64_t a, std::int64_t d) {
    return static_cast<std::size_t>((a - 1) * (D + 1) + d);
  };

  // Damped sweeps (aperiodicity transform): f <- (1-tau) f + tau T f keeps
  // the same solution but converges even for periodic chains (lambda = 1
  // makes the transitions deterministic).
  constexpr double tau = 0.5;
  double j = 0.0;
  double span = std::numeric_limits<double>::infinity();
  bool converged = false;
  int it = 0;
  for (; it < trunc.max_iters; ++it) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const double* f = table.f.data();
    for (std::int64_t a = 1; a <= A; ++a) {
      const std::int64_t a_up = std::min(a + 1, A);
      const double f_reset_sched = f[idx(1, std::min(a, D))];
      const double sched_tail = static_cast<double>(a) + m +
                                (1.0 - lam) * f[idx(a_up, 0)] + lam * f_reset_sched;
      const double* f_up_row = f + idx(a_up, 0);
      const double* f_one_row = f + idx(1, 0);
      double* out = next.data() + idx(a, 0);
      const double* cur = f + idx(a, 0);
      for (std::int64_t d = 0; d <= D; ++d) {
        const std::int64_t da = std::min(d + a, D);
        const double idle = static_cast<double>(d + a) + (1.0 - lam) * f_up_row[d] +
                            lam * f_one_row[da];
        const double v = std::min(idle, sched_tail);
        out[d] = v;
        const double diff = v - cur[d];
        lo = std::min(lo, diff);
        hi = std::max(hi, diff);
      }
    }
    j = next[idx(1, 0)] - table.f[idx(1, 0)];
    span = hi - lo;
    // Damped update, shifted so f(1,0) stays 0.
    const double shift = tau * next[idx(1, 0)] + (1.0 - tau) * table.f[idx(1, 0)];
    for (std::size_t s = 0; s < n_states; ++s) {
      table.f[s] = (1.0 - tau) * table.f[s] + tau * next[s] - shift;
    }
    if (span <= trunc.tol) {
      converged = true;
      ++it;
      break;
    }
  }
  table.iterations = it;
  table.final_span = span;
  table.j_avg = j;
  if (!converged) {
    throw SolveError("solve_decoupled: no convergence after " +
                         std::to_string(trunc.max_iters) + " iterations, span " +
                         std::to_string(span),
                     span);
  }

  // Greedy policy under the converged table; exact ties go to idle.
  table.schedule.assign(n_states, 0);
  for (std::int64_t a = 1; a <= A; ++a) {
    for (std::int64_t d = 0; d <= D; ++d) {
      const auto [idle, sched] = table.branch_values(a, d);
      table.schedule[idx(a, d)] = sched < idle ? 1 : 0;
    }
  }

  // Inadequate truncation shows up as ages whose threshold never crosses on
  // the grid, or as a policy that is not single-crossing in d.
  const double root = beta(params);
  const std::int64_t guard = std::max<std::int64_t>(10, static_cast<std::int64_t>(std::ceil(2.0 * root)));
  const double eps = tie_eps(params);
  for (std::int64_t a = 1; a <= A - guard; ++a) {
    bool seen_sched = false;
    for (std::int64_t d = 0; d <= D; ++d) {
      const auto [idle, sched] = table.branch_values(a, d);
      const bool schedules = sched <= idle + eps;
      if (seen_sched && !schedules) {
        table.truncation_warning = true;
        break;
      }
      seen_sched = seen_sched || schedules;
    }
    if (!seen_sched) table.truncation_warning = true;
    if (table.truncation_warning) break;
  }
  return table;
}

std::vector<std::int64_t> extract_thresholds(const DecoupledTable& table) {
  const std::int64_t A = table.trunc.a_max;
  const std::int64_t D = table.trunc.d_max;
  const double eps = tie_eps(table.params);
  std::vector<std::int64_t> crossing(static_cast<std::size_t>(A), D + 1);
  for (std::int64_t a = 1; a <= A; ++a) {
    std::int64_t first = D + 1;
    bool seen_sched = false;
    for (std::int64_t d = 0; d <= D; ++d) {
      const auto [idle, sched] = table.branch_values(a, d);
      const bool schedules = sched <= idle + eps;
      if (schedules && !seen_sched) {
        first = d;
        seen_sched = true;
      } else if (!schedules && seen_sched) {
        throw StructureError("extract_thresholds: policy not threshold-form at a=" +
                             std::to_string(a) + ", d=" + std::to_string(d));
      }
    }
    crossing[static_cast<std::size_t>(a - 1)] = first;
  }
  return crossing;
}

JointTable solve_joint(std::span<const double> lambdas, const TruncationSpec& trunc) {
  if (lambdas.size() != 2) {
    throw std::invalid_argument("solve_joint: exactly 2 terminals supported, got " +
                                std::to_string(lambdas.size()));
  }
  for (const double lam : lambdas) validate(DecoupledParams{lam, 0.0});
  validate(trunc);

  JointTable table;
  table.lambdas = {lambdas[0], lambdas[1]};
  table.trunc = trunc;

  const std::int64_t A = trunc.a_max;
  const std::int64_t D = trunc.d_max;
  const std::size_t M = table.codes_per_terminal();
  const std::size_t n_states = M * M;

  // Per-terminal transition targets and stage costs by state code.
  std::vector<std::uint32_t> idle_noarr(M), idle_arr(M), sched_noarr(M), sched_arr(M);
  std::vector<double> h_of(M), a_of(M);
  for (std::int64_t a = 1; a <= A; ++a) {
    for (std::int64_t d = 0; d <= D; ++d) {
      const std::size_t c = static_cast<std::size_t>((a - 1) * (D + 1) + d);
      const TerminalState s{a, d};
      const auto clamp_code = [&](TerminalState t) {
        t.a = std::min(t.a, A);
        t.d = std::min(t.d, D);
        return static_cast<std::uint32_t>((t.a - 1) * (D + 1) + t.d);
      };
      idle_noarr[c] = clamp_code(step_terminal(s, false, false));
      idle_arr[c] = clamp_code(step_terminal(s, false, true));
      sched_noarr[c] = clamp_code(step_terminal(s, true, false));
      sched_arr[c] = clamp_code(step_terminal(s, true, true));
      h_of[c] = static_cast<double>(a + d);
      a_of[c] = static_cast<double>(a);
    }
  }

  const double l0 = lambdas[0], l1 = lambdas[1];
  const double w00 = (1.0 - l0) * (1.0 - l1);
  const double w01 = (1.0 - l0) * l1;
  const double w10 = l0 * (1.0 - l1);
  const double w11 = l0 * l1;

  std::vector<double> f(n_states, 0.0), next(n_states, 0.0);
  const std::size_t ref = 0;  // both terminals at (1, 0)

  constexpr double tau = 0.5;  // damped sweeps, as in solve_decoupled
  double j = 0.0;
  double span = std::numeric_limits<double>::infinity();
  bool converged = false;
  int it = 0;
  for (; it < trunc.max_iters; ++it) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t c0 = 0; c0 < M; ++c0) {
      const std::size_t s0n = idle_noarr[c0], s0a = idle_arr[c0];
      const std::size_t t0n = sched_noarr[c0], t0a = sched_arr[c0];
      const double row_h0 = h_of[c0], row_a0 = a_of[c0];
      double* out = next.data() + c0 * M;
      const double* cur = f.data() + c0 * M;
      for (std::size_t c1 = 0; c1 < M; ++c1) {
        const std::size_t s1n = idle_noarr[c1], s1a = idle_arr[c1];
        const std::size_t t1n = sched_noarr[c1], t1a = sched_arr[c1];
        // Schedule terminal 0.
        const double q0 = row_a0 + h_of[c1] +
                          w00 * f[t0n * M + s1n] + w01 * f[t0n * M + s1a] +
                          w10 * f[t0a * M + s1n] + w11 * f[t0a * M + s1a];
        // Schedule terminal 1.
        const double q1 = row_h0 + a_of[c1] +
                          w00 * f[s0n * M + t1n] + w01 * f[s0n * M + t1a] +
                          w10 * f[s0a * M + t1n] + w11 * f[s0a * M + t1a];
        const double v = std::min(q0, q1);
        out[c1] = v;
        const double diff = v - cur[c1];
        lo = std::min(lo, diff);
        hi = std::max(hi, diff);
      }
    }
    j = next[ref] - f[ref];
    span = hi - lo;
    const double shift = tau * next[ref] + (1.0 - tau) * f[ref];
    for (std::size_t s = 0; s < n_states; ++s) f[s] = (1.0 - tau) * f[s] + tau * next[s] - shift;
    if (span <= trunc.tol) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) {
    throw SolveError("solve_joint: no convergence after " + std::to_string(trunc.max_iters) +
                         " iterations, span " + std::to_string(span),
                     span);
  }

  table.f = std::move(f);
  table.iterations = it;
  table.final_span = span;
  table.j_avg = j;

  table.action.assign(n_states, 0);
  const double* ff = table.f.data();
  for (std::size_t c0 = 0; c0 < M; ++c0) {
    const std::size_t s0n = idle_noarr[c0], s0a = idle_arr[c0];
    const std::size_t t0n = sched_noarr[c0], t0a = sched_arr[c0];
    for (std::size_t c1 = 0; c1 < M; ++c1) {
      const std::size_t s1n = idle_noarr[c1], s1a = idle_arr[c1];
      const std::size_t t1n = sched_noarr[c1], t1a = sched_arr[c1];
      const double q0 = a_of[c0] + h_of[c1] +
                        w00 * ff[t0n * M + s1n] + w01 * ff[t0n * M + s1a] +
                        w10 * ff[t0a * M + s1n] + w11 * ff[t0a * M + s1a];
      const double q1 = h_of[c0] + a_of[c1] +
                        w00 * ff[s0n * M + t1n] + w01 * ff[s0n * M + t1a] +
                        w10 * ff[s0a * M + t1n] + w11 * ff[s0a * M + t1a];
      table.action[c0 * M + c1] = q1 < q0 ? 1 : 0;
    }
  }
  return table;
}

void write_csv(const DecoupledTable& table, std::ostream& out) {
  out << "# decoupled value table: lambda=" << format_double(table.params.lambda)
      << " m=" << format_double(table.params.m) << " a_max=" << table.trunc.a_max
      << " d_max=" << table.trunc.d_max << " j_avg=" << format_double(table.j_avg) << "\n";
  out << "a,d,f,schedule\n";
  for (std::int64_t a = 1; a <= table.trunc.a_max; ++a) {
    for (std::int64_t d = 0; d <= table.trunc.d_max; ++d) {
      out << a << ',' << d << ',' << format_double(table.f_at(a, d)) << ','
          << (table.schedules(a, d) ? 1 : 0) << "\n";
    }
  }
}

void write_csv(const JointTable& table, std::ostream& out) {
  out << "# joint value table: lambda0=" << format_double(table.lambdas[0])
      << " lambda1=" << format_double(table.lambdas[1]) << " a_max=" << table.trunc.a_max
      << " d_max=" << table.trunc.d_max << " j_avg=" << format_double(table.j_avg) << "\n";
  out << "a0,d0,a1,d1,f,action\n";
  const std::size_t M = table.codes_per_terminal();
  for (std::int64_t a0 = 1; a0 <= table.trunc.a_max; ++a0) {
    for (std::int64_t d0 = 0; d0 <= table.trunc.d_max; ++d0) {
      const std::size_t c0 = table.code({a0, d0});
      for (std::int64_t a1 = 1; a1 <= table.trunc.a_max; ++a1) {
        for (std::int64_t d1 = 0; d1 <= table.trunc.d_max; ++d1) {
          const std::size_t s = c0 * M + table.code({a1, d1});
          out << a0 << ',' << d0 << ',' << a1 << ',' << d1 << ','
              << format_double(table.f[s]) << ',' << int(table.action[s]) << "\n";
        }
      }
    }
  }
}

}  // namespace aoisim
