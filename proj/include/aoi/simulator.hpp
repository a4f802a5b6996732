#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aoi/ipra.hpp"
#include "aoi/mdp.hpp"
#include "aoi/model.hpp"
#include "aoi/policies.hpp"

namespace aoisim {

enum class PolicyKind {
  whittle_one_buffer,
  whittle_no_buffer,
  rr_one,
  max_age,
  uniform_random,
  mdp_optimal,
  ipra,
};

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> policy_kind_from_string(std::string_view name);

struct Scenario {
  int n_terminals = 1;
  ArrivalRates lambdas;  // per terminal; filled uniformly by configs with one rate
  PolicyKind policy = PolicyKind::whittle_one_buffer;
  std::int64_t horizon = 1'000'000;            // total slots, warmup included
  std::optional<std::int64_t> warmup;          // defaults to max(1000, horizon/100)
  std::uint64_t seed = 1;
  int replications = 1;
  std::optional<IpraParams> ipra;              // required for PolicyKind::ipra
  TruncationSpec mdp_trunc{32, 32, 1e-7, 200000};  // for PolicyKind::mdp_optimal
};

std::int64_t default_warmup(std::int64_t horizon);
std::int64_t resolved_warmup(const Scenario& scenario);

// Field-level diagnostics; empty means the scenario is runnable.
std::vector<std::string> validate_scenario(const Scenario& scenario);

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimReport {
  double mean_aoi = 0.0;                    // averaged over slots and terminals
  std::vector<double> per_terminal_aoi;
  std::optional<double> std_error;          // across replications, absent for one
  std::uint64_t success_count = 0;
  std::uint64_t collision_count = 0;
  std::uint64_t idle_count = 0;
  std::optional<double> overhead_fraction;  // IPRA only
  std::uint64_t measured_rounds = 0;        // decision rounds after warmup
  double measured_frames = 0.0;             // elapsed measured time, frame units
  int replications = 1;
};

// Per-slot record for traces and replay tests. For IPRA runs a "slot" is one
// frame-equivalent of elapsed time (the instant terminal states step).
struct SlotRecord {
  std::int64_t t = 0;  // slot index from run start (warmup included)
  std::span<const TerminalState> before;
  std::span<const TerminalState> after;
  Decision delivered;  // terminal whose packet reached the destination
  std::span<const std::uint8_t> arrivals;
};
using SlotObserver = std::function<void(const SlotRecord&)>;

// Per-contention-round record (IPRA runs only).
struct RoundRecord {
  std::int64_t round = 0;
  ContentionOutcome::Kind kind = ContentionOutcome::Kind::idle;
  int winner = -1;
  std::int64_t elapsed_units = 0;
  std::span<const TerminalState> states;  // after the round completed
};
using RoundObserver = std::function<void(const RoundRecord&)>;

// Single replication (index 0). Deterministic for a fixed seed.
SimReport run(const Scenario& scenario);
SimReport run(const Scenario& scenario, const SlotObserver& slot_observer,
              const RoundObserver& round_observer = nullptr);

// Independent replications with seeds derived from the base seed; reports the
// mean and its standard error (absent when replications == 1).
SimReport run_replications(const Scenario& scenario, int threads = 1);

// Streams the per-slot trace as CSV (t, per-terminal a and d, delivered
// terminal, arrival flags). Opt-in because of its size.
SimReport run_with_trace(const Scenario& scenario, std::ostream& trace_out);

// Per-round CSV trace for IPRA runs.
SimReport run_with_round_trace(const Scenario& scenario, std::ostream& trace_out);

}  // namespace aoisim
