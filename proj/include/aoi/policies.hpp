#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "aoi/mdp.hpp"
#include "aoi/model.hpp"
#include "aoi/rng.hpp"

namespace aoisim {

// Centralized decision for one slot: at most one terminal transmits.
// nullopt is an idle slot (nothing worth sending).
using Decision = std::optional<int>;

// Greedy one-buffer index policy: schedule the terminal with the largest
// Whittle index, ties to the lowest id, idle when every index is zero.
Decision decide_whittle_one_buffer(const SystemState& state, std::span<const double> lambdas);

// No-buffer variant: only packets that arrived this slot exist, with age
// exactly 1, so the candidate index is whittle(lambda, 1, h - 1).
Decision decide_whittle_no_buffer(std::span<const std::uint8_t> fresh_arrival,
                                  std::span<const std::int64_t> aoi_now,
                                  std::span<const double> lambdas);

// Fixed rotation; transmits the cursor terminal regardless of buffer content
// (a d = 0 transmission reduces nothing) and always advances the cursor.
Decision decide_rr_one(int& cursor, const SystemState& state);

// Largest post-idle AoI among terminals with something to deliver.
Decision decide_max_age(const SystemState& state);

// Playback of a solved two-terminal table; off-grid states are clamped.
Decision decide_mdp(const JointTable& table, const SystemState& state);

class SchedulingPolicy {
 public:
  virtual ~SchedulingPolicy() = default;
  virtual Decision decide(const SystemState& state) = 0;
  virtual void reset() {}
  virtual std::string_view name() const = 0;
};

class WhittleOneBufferPolicy final : public SchedulingPolicy {
 public:
  explicit WhittleOneBufferPolicy(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {}
  Decision decide(const SystemState& state) override {
    return decide_whittle_one_buffer(state, lambdas_);
  }
  std::string_view name() const override { return "whittle-1buf"; }

 private:
  std::vector<double> lambdas_;
};

// Derives the no-buffer view from the full state: a packet counts as present
// only when it arrived at the previous slot boundary (a == 1).
class WhittleNoBufferPolicy final : public SchedulingPolicy {
 public:
  explicit WhittleNoBufferPolicy(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {}
  Decision decide(const SystemState& state) override;
  std::string_view name() const override { return "whittle-0buf"; }

 private:
  std::vector<double> lambdas_;
  std::vector<std::uint8_t> fresh_;
  std::vector<std::int64_t> aoi_;
};

class RrOnePolicy final : public SchedulingPolicy {
 public:
  Decision decide(const SystemState& state) override { return decide_rr_one(cursor_, state); }
  void reset() override { cursor_ = 0; }
  std::string_view name() const override { return "rr-one"; }

 private:
  int cursor_ = 0;
};

class MaxAgePolicy final : public SchedulingPolicy {
 public:
  Decision decide(const SystemState& state) override { return decide_max_age(state); }
  std::string_view name() const override { return "max-age"; }
};

// Uniform pick among terminals with d > 0; idle when none.
class UniformRandomPolicy final : public SchedulingPolicy {
 public:
  explicit UniformRandomPolicy(Stream stream) : stream_(stream) {}
  Decision decide(const SystemState& state) override;
  std::string_view name() const override { return "random"; }

 private:
  Stream stream_;
  std::vector<int> candidates_;
};

class MdpPolicy final : public SchedulingPolicy {
 public:
  explicit MdpPolicy(std::shared_ptr<const JointTable> table) : table_(std::move(table)) {}
  Decision decide(const SystemState& state) override;
  std::string_view name() const override { return "mdp"; }
  std::uint64_t clamp_events() const { return clamp_events_; }

 private:
  std::shared_ptr<const JointTable> table_;
  std::uint64_t clamp_events_ = 0;
};

}  // namespace aoisim
