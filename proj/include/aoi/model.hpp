#pragma once

#include <cstdint>
#include <vector>

namespace aoisim {

// Per-terminal state. `a` is the age of the buffered packet in slots and `d`
// is the gap between the destination's AoI and that age, i.e. the AoI
// reduction a delivery would achieve. A fresh packet has a = 1 at decision
// time. An empty buffer is encoded as d = 0 with a equal to the AoI, so
// transmitting changes nothing.
struct TerminalState {
  std::int64_t a = 1;
  std::int64_t d = 0;

  friend bool operator==(const TerminalState&, const TerminalState&) = default;
};

using SystemState = std::vector<TerminalState>;

// Bernoulli arrival rates, one per terminal.
using ArrivalRates = std::vector<double>;

inline bool valid(const TerminalState& s) { return s.a >= 1 && s.d >= 0; }

// Age of information at the destination: h = a + d.
inline std::int64_t aoi(const TerminalState& s) { return s.a + s.d; }

// Post-action AoI sampled in a slot: a delivery removes the d gap.
inline std::int64_t slot_cost(const TerminalState& s, bool scheduled) {
  return scheduled ? s.a : s.a + s.d;
}

// One-slot transition. `scheduled` means the terminal delivered its buffered
// packet this slot; `arrival` means a new status packet was generated at slot
// end (and replaces the buffer, one-buffer rule).
inline TerminalState step_terminal(TerminalState s, bool scheduled, bool arrival) {
  if (scheduled) s.d = 0;
  if (arrival) return {1, s.d + s.a};
  return {s.a + 1, s.d};
}

}  // namespace aoisim
