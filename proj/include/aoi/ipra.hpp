#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aoi/model.hpp"
#include "aoi/rng.hpp"

namespace aoisim {

struct Scenario;

// Index-prioritized random access. Terminals whose local index reaches the
// public threshold contend with probability p in a short slot of length
// delta; a transmission occupies a frame of length t_s, a collision t_c.
// Times are arbitrary units; t_s/delta and t_c/delta must be integers so the
// engine can account time exactly. t_c defaults to t_s (a terminal learns of
// a collision only at frame end).
struct IpraParams {
  double p = 1.0;
  double index_threshold = 0.0;
  double t_s = 100.0;
  double t_c = 100.0;
  double delta = 1.0;
};

void validate(const IpraParams& params);

std::int64_t frame_units(const IpraParams& params);      // t_s / delta
std::int64_t collision_units(const IpraParams& params);  // t_c / delta

struct ContentionOutcome {
  enum class Kind : std::uint8_t { idle, success, collision };
  Kind kind = Kind::idle;
  int winner = -1;                 // success only
  std::vector<int> transmitters;   // terminals that transmitted this round
  std::int64_t elapsed_units = 0;  // contention slot plus any frame, in delta units
};

// Index a terminal computes from its own history: own ACKs fix d, own
// arrivals fix a. Equals the one-buffer Whittle index.
double local_index(const TerminalState& terminal, double lambda);

// One contention round: every terminal with index >= threshold (and a
// positive index; an empty buffer is never worth a collision) transmits with
// probability p. Exactly one transmitter is a success, two or more collide,
// none is an idle round of a single contention slot.
ContentionOutcome contention_round(std::span<const double> indices, const IpraParams& params,
                                   Stream& rng);

// Fraction of elapsed time spent in successful transmission frames.
// Throws std::invalid_argument on an empty trace.
double overhead_fraction(std::span<const ContentionOutcome> trace);

struct IpraSearchRange {
  double p_min = 0.05;
  double p_max = 1.0;
  double threshold_min = 0.0;
  double threshold_max = 50.0;
};

struct IpraOptimum {
  IpraParams params;
  double mean_aoi = 0.0;
  std::optional<double> std_error;
  bool fallback_grid = false;  // unimodal search failed; coarse lattice answer
  int evaluations = 0;
};

// Tunes (p, index_threshold) for the scenario by nested golden-section search
// over the given ranges, each probe a fixed-seed simulation of the scenario's
// horizon. If the search lands above the best coarse-lattice point the
// surface was not unimodal along the probed lines; the lattice answer is
// returned with fallback_grid set. The winning pair is re-evaluated with the
// scenario's replication count for the error bar.
IpraOptimum optimize_params(const Scenario& scenario, const IpraSearchRange& range, int budget);

}  // namespace aoisim
