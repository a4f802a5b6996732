#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "aoi/model.hpp"
#include "aoi/whittle.hpp"

namespace aoisim {

// Grid truncation and stopping rule for relative value iteration. Transitions
// that would leave the grid are clamped to the boundary; property checks are
// expected to stay a guard band away from it.
struct TruncationSpec {
  std::int64_t a_max = 128;
  std::int64_t d_max = 128;
  double tol = 1e-9;   // span-seminorm stopping threshold
  int max_iters = 200000;
};

void validate(const TruncationSpec& trunc);

// Relative value iteration failed to reach the span tolerance.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, double last_span)
      : std::runtime_error(what), last_span_(last_span) {}
  double last_span() const { return last_span_; }

 private:
  double last_span_;
};

// The greedy policy is not of threshold form in d.
class StructureError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solution of the decoupled single-terminal model on a truncated grid.
// f is the differential cost-to-go with f(1,0) pinned to 0.
struct DecoupledTable {
  DecoupledParams params;
  TruncationSpec trunc;
  std::vector<double> f;                  // a_max rows of (d_max+1) entries
  std::vector<std::uint8_t> schedule;     // greedy action, ties resolved to idle
  double j_avg = 0.0;
  int iterations = 0;
  double final_span = 0.0;
  bool truncation_warning = false;

  std::size_t idx(std::int64_t a, std::int64_t d) const {
    return static_cast<std::size_t>((a - 1) * (trunc.d_max + 1) + d);
  }
  double f_at(std::int64_t a, std::int64_t d) const { return f[idx(a, d)]; }
  bool schedules(std::int64_t a, std::int64_t d) const { return schedule[idx(a, d)] != 0; }

  // Bellman branch values under the converged f (idle, schedule).
  std::pair<double, double> branch_values(std::int64_t a, std::int64_t d) const;
};

DecoupledTable solve_decoupled(const DecoupledParams& params, const TruncationSpec& trunc);

// Smallest d per packet age at which the solved policy schedules; d_max + 1
// when it never does on the grid. Numerical ties between the two Bellman
// branches count as scheduling, matching the d >= D_a rule. Throws
// StructureError if the policy is not single-crossing in d.
std::vector<std::int64_t> extract_thresholds(const DecoupledTable& table);

// Exact two-terminal MDP. Actions schedule terminal 0 or terminal 1; the
// stage cost is the summed post-action AoI, so j_avg / 2 is the per-terminal
// optimum benchmark.
struct JointTable {
  std::array<double, 2> lambdas{1.0, 1.0};
  TruncationSpec trunc;
  std::vector<double> f;
  std::vector<std::uint8_t> action;  // 0 or 1, ties resolved to terminal 0
  double j_avg = 0.0;
  int iterations = 0;
  double final_span = 0.0;

  std::size_t codes_per_terminal() const {
    return static_cast<std::size_t>(trunc.a_max * (trunc.d_max + 1));
  }
  std::size_t code(const TerminalState& s) const {
    return static_cast<std::size_t>((s.a - 1) * (trunc.d_max + 1) + s.d);
  }
  TerminalState clamp(const TerminalState& s) const {
    return {std::min(s.a, trunc.a_max), std::min(s.d, trunc.d_max)};
  }
  std::size_t idx(const TerminalState& s0, const TerminalState& s1) const {
    return code(s0) * codes_per_terminal() + code(s1);
  }
  int action_at(const TerminalState& s0, const TerminalState& s1) const {
    return action[idx(clamp(s0), clamp(s1))];
  }
};

// Rejects anything but exactly two rates (the exact solver is the N = 2
// benchmark; larger joint state spaces are out of reach).
JointTable solve_joint(std::span<const double> lambdas, const TruncationSpec& trunc);

// CSV dumps for inspection; the header comment carries the grid dimensions.
void write_csv(const DecoupledTable& table, std::ostream& out);
void write_csv(const JointTable& table, std::ostream& out);

}  // namespace aoisim
