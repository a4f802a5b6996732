#include "aoi/policies.hpp"

#include <stdexcept>

#include "aoi/whittle.hpp"

namespace aoisim {

Decision decide_whittle_one_buffer(const SystemState& state, std::span<const double> lambdas) {
  int best = -1;
  double best_index = 0.0;
  for (std::size_t n = 0; n < state.size(); ++n) {
    const double idx = whittle(lambdas[n], state[n].a, state[n].d);
    if (idx > best_index) {
      best_index = idx;
      best = static_cast<int>(n);
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

Decision decide_whittle_no_buffer(std::span<const std::uint8_t> fresh_arrival,
                                  std::span<const std::int64_t> aoi_now,
                                  std::span<const double> lambdas) {
  int best = -1;
  double best_index = 0.0;
  for (std::size_t n = 0; n < fresh_arrival.size(); ++n) {
    if (!fresh_arrival[n]) continue;
    const double idx = whittle(lambdas[n], 1, aoi_now[n] - 1);
    if (idx > best_index) {
      best_index = idx;
      best = static_cast<int>(n);
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

Decision decide_rr_one(int& cursor, const SystemState& state) {
  const int n = static_cast<int>(state.size());
  if (cursor < 0 || cursor >= n) throw std::invalid_argument("decide_rr_one: cursor out of range");
  const int picked = cursor;
  cursor = (cursor + 1) % n;
  return picked;
}

Decision decide_max_age(const SystemState& state) {
  int best = -1;
  std::int64_t best_aoi = 0;
  for (std::size_t n = 0; n < state.size(); ++n) {
    if (state[n].d <= 0) continue;
    const std::int64_t h = aoi(state[n]);
    if (h > best_aoi) {
      best_aoi = h;
      best = static_cast<int>(n);
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

Decision decide_mdp(const JointTable& table, const SystemState& state) {
  if (state.size() != 2) throw std::invalid_argument("decide_mdp: table covers 2 terminals");
  return table.action_at(state[0], state[1]);
}

Decision WhittleNoBufferPolicy::decide(const SystemState& state) {
  fresh_.resize(state.size());
  aoi_.resize(state.size());
  for (std::size_t n = 0; n < state.size(); ++n) {
    fresh_[n] = state[n].a == 1 ? 1 : 0;
    aoi_[n] = aoi(state[n]);
  }
  return decide_whittle_no_buffer(fresh_, aoi_, lambdas_);
}

Decision UniformRandomPolicy::decide(const SystemState& state) {
  candidates_.clear();
  for (std::size_t n = 0; n < state.size(); ++n) {
    if (state[n].d > 0) candidates_.push_back(static_cast<int>(n));
  }
  if (candidates_.empty()) return std::nullopt;
  return candidates_[stream_.next_below(candidates_.size())];
}

Decision MdpPolicy::decide(const SystemState& state) {
  if (state.size() != 2) throw std::invalid_argument("MdpPolicy: expects 2 terminals");
  if (state[0].a > table_->trunc.a_max || state[0].d > table_->trunc.d_max ||
      state[1].a > table_->trunc.a_max || state[1].d > table_->trunc.d_max) {
    ++clamp_events_;
  }
  return table_->action_at(state[0], state[1]);
}

}  // namespace aoisim
