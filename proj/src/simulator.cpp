#include "aoi/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

#include "aoi/csv.hpp"
#include "aoi/whittle.hpp"

namespace aoisim {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::whittle_one_buffer: return "whittle-1buf";
    case PolicyKind::whittle_no_buffer: return "whittle-0buf";
    case PolicyKind::rr_one: return "rr-one";
    case PolicyKind::max_age: return "max-age";
    case PolicyKind::uniform_random: return "random";
    case PolicyKind::mdp_optimal: return "mdp";
    case PolicyKind::ipra: return "ipra";
  }
  return "?";
}

std::optional<PolicyKind> policy_kind_from_string(std::string_view name) {
  for (const PolicyKind kind :
       {PolicyKind::whittle_one_buffer, PolicyKind::whittle_no_buffer, PolicyKind::rr_one,
        PolicyKind::max_age, PolicyKind::uniform_random, PolicyKind::mdp_optimal,
        PolicyKind::ipra}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::int64_t default_warmup(std::int64_t horizon) {
  const std::int64_t pct = horizon / 100;
  return std::min(std::max<std::int64_t>(1000, pct), horizon / 2);
}

std::int64_t resolved_warmup(const Scenario& scenario) {
  return scenario.warmup.value_or(default_warmup(scenario.horizon));
}

std::vector<std::string> validate_scenario(const Scenario& sc) {
  std::vector<std::string> diags;
  if (sc.n_terminals < 1) diags.push_back("terminals: must be >= 1");
  if (sc.lambdas.size() != static_cast<std::size_t>(std::max(sc.n_terminals, 0))) {
    diags.push_back("lambdas: expected " + std::to_string(sc.n_terminals) + " rates, got " +
                    std::to_string(sc.lambdas.size()));
  }
  for (std::size_t n = 0; n < sc.lambdas.size(); ++n) {
    const double lam = sc.lambdas[n];
    if (!(lam > 0.0) || lam > 1.0 || !std::isfinite(lam)) {
      diags.push_back("lambdas[" + std::to_string(n) + "]: rate out of range (0,1]: " +
                      std::to_string(lam));
    }
  }
  if (sc.horizon < 1) diags.push_back("horizon: must be >= 1");
  if (sc.warmup) {
    if (*sc.warmup < 0) diags.push_back("warmup: must be >= 0");
    if (*sc.warmup >= sc.horizon) diags.push_back("warmup: must be < horizon");
  }
  if (sc.replications < 1) diags.push_back("replications: must be >= 1");
  if (sc.policy == PolicyKind::ipra) {
    if (!sc.ipra) {
      diags.push_back("ipra: parameters required for the ipra policy");
    } else {
      try {
        validate(*sc.ipra);
      } catch (const std::exception& e) {
        diags.push_back(std::string("ipra: ") + e.what());
      }
    }
  }
  if (sc.policy == PolicyKind::mdp_optimal) {
    if (sc.n_terminals != 2) diags.push_back("policy mdp: requires exactly 2 terminals");
    try {
      validate(sc.mdp_trunc);
    } catch (const std::exception& e) {
      diags.push_back(std::string("mdp: ") + e.what());
    }
  }
  return diags;
}

namespace {

void throw_if_invalid(const Scenario& sc) {
  const auto diags = validate_scenario(sc);
  if (diags.empty()) return;
  std::string msg = "invalid scenario:";
  for (const auto& d : diags) msg += "\n  " + d;
  throw ConfigError(msg);
}

std::unique_ptr<SchedulingPolicy> make_policy(const Scenario& sc,
                                              const std::shared_ptr<const JointTable>& mdp,
                                              Stream policy_stream) {
  switch (sc.policy) {
    case PolicyKind::whittle_one_buffer:
      return std::make_unique<WhittleOneBufferPolicy>(sc.lambdas);
    case PolicyKind::whittle_no_buffer:
      return std::make_unique<WhittleNoBufferPolicy>(sc.lambdas);
    case PolicyKind::rr_one: return std::make_unique<RrOnePolicy>();
    case PolicyKind::max_age: return std::make_unique<MaxAgePolicy>();
    case PolicyKind::uniform_random: return std::make_unique<UniformRandomPolicy>(policy_stream);
    case PolicyKind::mdp_optimal: return std::make_unique<MdpPolicy>(mdp);
    case PolicyKind::ipra: break;
  }
  throw std::logic_error("make_policy: ipra runs through the contention engine");
}

SimReport run_centralized(const Scenario& sc, const std::shared_ptr<const JointTable>& mdp,
                          std::uint64_t rep, const SlotObserver* observer) {
  const int n = sc.n_terminals;
  const std::int64_t warmup = resolved_warmup(sc);
  RunRng rng(sc.seed, rep);
  std::vector<Stream> arrivals_rng;
  arrivals_rng.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) arrivals_rng.push_back(rng.stream(static_cast<std::uint64_t>(i)));
  auto policy = make_policy(sc, mdp, rng.stream(static_cast<std::uint64_t>(n)));

  SystemState state(static_cast<std::size_t>(n), TerminalState{1, 0});
  SystemState before;
  std::vector<std::uint8_t> arrivals(static_cast<std::size_t>(n), 0);
  std::vector<double> cost(static_cast<std::size_t>(n), 0.0);
  std::uint64_t success = 0, idle = 0;

  for (std::int64_t t = 0; t < sc.horizon; ++t) {
    const Decision dec = policy->decide(state);
    if (t >= warmup) {
      if (dec) {
        ++success;
      } else {
        ++idle;
      }
      for (int i = 0; i < n; ++i) {
        cost[static_cast<std::size_t>(i)] +=
            static_cast<double>(slot_cost(state[static_cast<std::size_t>(i)], dec && *dec == i));
      }
    }
    for (int i = 0; i < n; ++i) {
      arrivals[static_cast<std::size_t>(i)] =
          arrivals_rng[static_cast<std::size_t>(i)].bernoulli(sc.lambdas[static_cast<std::size_t>(i)]) ? 1 : 0;
    }
    if (observer) before = state;
    for (int i = 0; i < n; ++i) {
      auto& s = state[static_cast<std::size_t>(i)];
      s = step_terminal(s, dec && *dec == i, arrivals[static_cast<std::size_t>(i)] != 0);
    }
    if (observer) {
      (*observer)(SlotRecord{t, before, state, dec, arrivals});
    }
  }

  SimReport report;
  const double measured = static_cast<double>(sc.horizon - warmup);
  report.per_terminal_aoi.resize(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    report.per_terminal_aoi[static_cast<std::size_t>(i)] = cost[static_cast<std::size_t>(i)] / measured;
    total += cost[static_cast<std::size_t>(i)];
  }
  report.mean_aoi = total / (measured * n);
  report.success_count = success;
  report.idle_count = idle;
  report.measured_rounds = static_cast<std::uint64_t>(sc.horizon - warmup);
  report.measured_frames = measured;
  return report;
}

// Contention engine. Time advances in integer units of delta; one frame is
// frame_units(params) of them, and terminal states step once per full frame
// of elapsed time (a contention slot ages everyone by delta/t_s of a frame).
// Stretches of idle rounds at a fixed state are batched through a geometric
// draw, which leaves every distribution untouched.
SimReport run_ipra_engine(const Scenario& sc, std::uint64_t rep, const SlotObserver* slot_obs,
                          const RoundObserver* round_obs) {
  const IpraParams& params = *sc.ipra;
  const std::int64_t rs = frame_units(params);
  const std::int64_t rc = collision_units(params);
  const int n = sc.n_terminals;
  const double p = params.p;

  RunRng rng(sc.seed, rep);
  std::vector<Stream> arrivals_rng;
  arrivals_rng.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) arrivals_rng.push_back(rng.stream(static_cast<std::uint64_t>(i)));
  Stream contention = rng.stream(static_cast<std::uint64_t>(n) + 1);

  SystemState state(static_cast<std::size_t>(n), TerminalState{1, 0});
  SystemState before;
  std::vector<std::uint8_t> arrivals(static_cast<std::size_t>(n), 0);
  std::vector<double> index(static_cast<std::size_t>(n), 0.0);
  std::vector<int> eligible;
  std::vector<int> transmitters;

  const std::int64_t warm_units = resolved_warmup(sc) * rs;
  const std::int64_t end_units = sc.horizon * rs;

  std::int64_t elapsed = 0;  // delta units since run start
  std::int64_t carry = 0;    // delta units since the last frame boundary
  std::int64_t t_slot = 0;   // frame-equivalent steps taken
  std::vector<double> cost(static_cast<std::size_t>(n), 0.0);
  std::int64_t measured_units = 0;
  std::int64_t success_frame_units = 0;
  std::uint64_t n_success = 0, n_collision = 0, n_idle = 0;

  // Adds `units` of elapsed time at the given per-terminal AoI values,
  // clipped to the measurement window. Returns the measured overlap.
  const auto add_segment = [&](std::int64_t units, std::span<const double> h) {
    const std::int64_t lo = std::max(elapsed, warm_units);
    const std::int64_t hi = std::min(elapsed + units, end_units);
    const std::int64_t overlap = hi - lo;
    if (overlap > 0) {
      for (int i = 0; i < n; ++i) {
        cost[static_cast<std::size_t>(i)] +=
            h[static_cast<std::size_t>(i)] * static_cast<double>(overlap);
      }
      measured_units += overlap;
    }
    elapsed += units;
    return std::max<std::int64_t>(overlap, 0);
  };
  std::vector<double> h_now(static_cast<std::size_t>(n), 0.0);
  const auto refresh_h = [&] {
    for (int i = 0; i < n; ++i) {
      h_now[static_cast<std::size_t>(i)] = static_cast<double>(aoi(state[static_cast<std::size_t>(i)]));
    }
  };

  // One frame-equivalent boundary: every terminal takes its kernel step;
  // `scheduled` is the terminal whose delivery completes at this boundary.
  const auto do_step = [&](int scheduled) {
    for (int i = 0; i < n; ++i) {
      arrivals[static_cast<std::size_t>(i)] =
          arrivals_rng[static_cast<std::size_t>(i)].bernoulli(sc.lambdas[static_cast<std::size_t>(i)]) ? 1 : 0;
    }
    if (slot_obs) before = state;
    for (int i = 0; i < n; ++i) {
      auto& s = state[static_cast<std::size_t>(i)];
      s = step_terminal(s, i == scheduled, arrivals[static_cast<std::size_t>(i)] != 0);
    }
    if (slot_obs) {
      const Decision dec = scheduled >= 0 ? Decision{scheduled} : std::nullopt;
      (*slot_obs)(SlotRecord{t_slot, before, state, dec, arrivals});
    }
    ++t_slot;
  };

  // Counts how many of `count` one-unit rounds starting at `start` lie in the
  // measurement window.
  const auto measured_rounds_in = [&](std::int64_t start, std::int64_t count) {
    const std::int64_t lo = std::max(start, warm_units);
    const std::int64_t hi = std::min(start + count, end_units);
    return std::max<std::int64_t>(hi - lo, 0);
  };

  std::int64_t round = 0;
  while (elapsed < end_units) {
    refresh_h();
    eligible.clear();
    for (int i = 0; i < n; ++i) {
      const auto& s = state[static_cast<std::size_t>(i)];
      index[static_cast<std::size_t>(i)] = local_index(s, sc.lambdas[static_cast<std::size_t>(i)]);
      const double idx = index[static_cast<std::size_t>(i)];
      if (idx >= params.index_threshold && idx > 0.0) eligible.push_back(i);
    }
    const std::int64_t to_wrap = rs - carry;

    // How many idle rounds precede the next transmitting round at this state.
    std::int64_t idle_run = 0;
    if (eligible.empty()) {
      idle_run = to_wrap;
    } else if (p < 1.0) {
      const double q0 = std::pow(1.0 - p, static_cast<double>(eligible.size()));
      const double u = contention.next_double();
      const double g = std::floor(std::log1p(-u) / std::log(q0));
      idle_run = g < static_cast<double>(to_wrap) ? static_cast<std::int64_t>(g) : to_wrap;
    }

    if (idle_run >= to_wrap) {
      // The state steps before anyone transmits; rerolling afterwards is
      // exact because the idle-run distribution is memoryless.
      n_idle += static_cast<std::uint64_t>(measured_rounds_in(elapsed, to_wrap));
      if (round_obs) {
        for (std::int64_t k = 0; k < to_wrap; ++k) {
          (*round_obs)(RoundRecord{round + k, ContentionOutcome::Kind::idle, -1, 1, state});
        }
      }
      round += to_wrap;
      add_segment(to_wrap, h_now);
      do_step(-1);
      carry = 0;
      continue;
    }

    if (idle_run > 0) {
      n_idle += static_cast<std::uint64_t>(measured_rounds_in(elapsed, idle_run));
      if (round_obs) {
        for (std::int64_t k = 0; k < idle_run; ++k) {
          (*round_obs)(RoundRecord{round + k, ContentionOutcome::Kind::idle, -1, 1, state});
        }
      }
      round += idle_run;
      add_segment(idle_run, h_now);
      carry += idle_run;
    }

    // Transmitting round. The set is drawn conditioned on being nonempty.
    transmitters.clear();
    do {
      for (const int i : eligible) {
        if (p >= 1.0 || contention.bernoulli(p)) transmitters.push_back(i);
      }
    } while (transmitters.empty());

    const bool round_measured = elapsed >= warm_units && elapsed < end_units;

    // Contention slot of the transmitting round; the decision above used the
    // pre-boundary indices, so a wrap here only affects the frame that follows.
    add_segment(1, h_now);
    carry += 1;
    if (carry >= rs) {
      do_step(-1);
      carry -= rs;
      refresh_h();
    }

    if (transmitters.size() == 1) {
      const int w = transmitters.front();
      if (round_measured) ++n_success;
      // Post-action accounting: the delivery frame already counts the
      // winner's AoI as its packet age.
      std::vector<double>& h_frame = h_now;
      const double saved = h_frame[static_cast<std::size_t>(w)];
      h_frame[static_cast<std::size_t>(w)] =
          static_cast<double>(state[static_cast<std::size_t>(w)].a);
      success_frame_units += add_segment(rs, h_frame);
      h_frame[static_cast<std::size_t>(w)] = saved;
      carry += rs;
      bool first = true;
      while (carry >= rs) {
        do_step(first ? w : -1);
        carry -= rs;
        first = false;
      }
      if (round_obs) {
        (*round_obs)(RoundRecord{round, ContentionOutcome::Kind::success, w, 1 + rs, state});
      }
    } else {
      if (round_measured) ++n_collision;
      add_segment(rc, h_now);
      carry += rc;
      while (carry >= rs) {
        do_step(-1);
        carry -= rs;
      }
      if (round_obs) {
        (*round_obs)(RoundRecord{round, ContentionOutcome::Kind::collision, -1, 1 + rc, state});
      }
    }
    ++round;
  }

  SimReport report;
  report.per_terminal_aoi.resize(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    report.per_terminal_aoi[static_cast<std::size_t>(i)] =
        cost[static_cast<std::size_t>(i)] / static_cast<double>(measured_units);
    total += cost[static_cast<std::size_t>(i)];
  }
  report.mean_aoi = total / (static_cast<double>(measured_units) * n);
  report.success_count = n_success;
  report.collision_count = n_collision;
  report.idle_count = n_idle;
  report.measured_rounds = n_success + n_collision + n_idle;
  report.measured_frames = static_cast<double>(measured_units) / static_cast<double>(rs);
  report.overhead_fraction =
      static_cast<double>(success_frame_units) / static_cast<double>(measured_units);
  return report;
}

SimReport run_one(const Scenario& sc, const std::shared_ptr<const JointTable>& mdp,
                  std::uint64_t rep, const SlotObserver* slot_obs, const RoundObserver* round_obs) {
  if (sc.policy == PolicyKind::ipra) return run_ipra_engine(sc, rep, slot_obs, round_obs);
  return run_centralized(sc, mdp, rep, slot_obs);
}

std::shared_ptr<const JointTable> prepare_mdp(const Scenario& sc) {
  if (sc.policy != PolicyKind::mdp_optimal) return nullptr;
  return std::make_shared<const JointTable>(solve_joint(sc.lambdas, sc.mdp_trunc));
}

}  // namespace

SimReport run(const Scenario& scenario) {
  throw_if_invalid(scenario);
  return run_one(scenario, prepare_mdp(scenario), 0, nullptr, nullptr);
}

SimReport run(const Scenario& scenario, const SlotObserver& slot_observer,
              const RoundObserver& round_observer) {
  throw_if_invalid(scenario);
  const SlotObserver* so = slot_observer ? &slot_observer : nullptr;
  const RoundObserver* ro = round_observer ? &round_observer : nullptr;
  return run_one(scenario, prepare_mdp(scenario), 0, so, ro);
}

SimReport run_replications(const Scenario& scenario, int threads) {
  throw_if_invalid(scenario);
  if (threads < 1) threads = 1;
  const auto mdp = prepare_mdp(scenario);
  const int reps = scenario.replications;

  std::vector<SimReport> parts(static_cast<std::size_t>(reps));
  for (int base = 0; base < reps; base += threads) {
    const int batch = std::min(threads, reps - base);
    std::vector<std::future<SimReport>> futures;
    futures.reserve(static_cast<std::size_t>(batch));
    for (int k = 0; k < batch; ++k) {
      futures.push_back(std::async(std::launch::async, [&, k] {
        return run_one(scenario, mdp, static_cast<std::uint64_t>(base + k), nullptr, nullptr);
      }));
    }
    for (int k = 0; k < batch; ++k) parts[static_cast<std::size_t>(base + k)] = futures[static_cast<std::size_t>(k)].get();
  }

  SimReport agg;
  agg.replications = reps;
  agg.per_terminal_aoi.assign(static_cast<std::size_t>(scenario.n_terminals), 0.0);
  double mean_sum = 0.0, mean_sq = 0.0, overhead_sum = 0.0;
  int overhead_n = 0;
  for (const auto& r : parts) {
    mean_sum += r.mean_aoi;
    mean_sq += r.mean_aoi * r.mean_aoi;
    for (std::size_t i = 0; i < agg.per_terminal_aoi.size(); ++i) {
      agg.per_terminal_aoi[i] += r.per_terminal_aoi[i] / reps;
    }
    agg.success_count += r.success_count;
    agg.collision_count += r.collision_count;
    agg.idle_count += r.idle_count;
    agg.measured_rounds += r.measured_rounds;
    agg.measured_frames += r.measured_frames;
    if (r.overhead_fraction) {
      overhead_sum += *r.overhead_fraction;
      ++overhead_n;
    }
  }
  agg.mean_aoi = mean_sum / reps;
  if (reps >= 2) {
    const double var = std::max(0.0, (mean_sq - mean_sum * mean_sum / reps) / (reps - 1));
    agg.std_error = std::sqrt(var / reps);
  }
  if (overhead_n > 0) agg.overhead_fraction = overhead_sum / overhead_n;
  return agg;
}

SimReport run_with_trace(const Scenario& scenario, std::ostream& trace_out) {
  throw_if_invalid(scenario);
  trace_out << "# per-slot trace: policy=" << to_string(scenario.policy)
            << " terminals=" << scenario.n_terminals << " seed=" << scenario.seed << "\n";
  trace_out << "t";
  for (int i = 0; i < scenario.n_terminals; ++i) trace_out << ",a" << i << ",d" << i;
  trace_out << ",delivered";
  for (int i = 0; i < scenario.n_terminals; ++i) trace_out << ",arr" << i;
  trace_out << "\n";
  const SlotObserver obs = [&](const SlotRecord& rec) {
    trace_out << rec.t;
    for (const auto& s : rec.before) trace_out << ',' << s.a << ',' << s.d;
    trace_out << ',' << (rec.delivered ? std::to_string(*rec.delivered) : std::string("-"));
    for (const auto a : rec.arrivals) trace_out << ',' << int(a);
    trace_out << "\n";
  };
  return run(scenario, obs);
}

SimReport run_with_round_trace(const Scenario& scenario, std::ostream& trace_out) {
  throw_if_invalid(scenario);
  if (scenario.policy != PolicyKind::ipra) {
    throw ConfigError("round trace: only meaningful for the ipra policy");
  }
  trace_out << "# per-round trace: terminals=" << scenario.n_terminals
            << " seed=" << scenario.seed << "\n";
  trace_out << "round,outcome,winner,elapsed_units";
  for (int i = 0; i < scenario.n_terminals; ++i) trace_out << ",h" << i;
  trace_out << "\n";
  const RoundObserver obs = [&](const RoundRecord& rec) {
    const char* kind = rec.kind == ContentionOutcome::Kind::idle      ? "idle"
                       : rec.kind == ContentionOutcome::Kind::success ? "success"
                                                                      : "collision";
    trace_out << rec.round << ',' << kind << ','
              << (rec.winner >= 0 ? std::to_string(rec.winner) : std::string("-")) << ','
              << rec.elapsed_units;
    for (const auto& s : rec.states) trace_out << ',' << aoi(s);
    trace_out << "\n";
  };
  return run(scenario, nullptr, obs);
}

}  // namespace aoisim
