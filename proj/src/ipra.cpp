#include "aoi/ipra.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "aoi/search.hpp"
#include "aoi/simulator.hpp"
#include "aoi/whittle.hpp"

namespace aoisim {

namespace {

std::int64_t integral_ratio(double num, double den, const char* what) {
  const double ratio = num / den;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9 * rounded) {
    throw std::invalid_argument(std::string(what) +
                                " must be an integer multiple of delta, got ratio " +
                                std::to_string(ratio));
  }
  return static_cast<std::int64_t>(rounded);
}

}  // namespace

void validate(const IpraParams& params) {
  if (!(params.p > 0.0) || params.p > 1.0) {
    throw std::invalid_argument("IpraParams: p must be in (0, 1]");
  }
  if (!(params.index_threshold >= 0.0) || !std::isfinite(params.index_threshold)) {
    throw std::invalid_argument("IpraParams: index_threshold must be >= 0");
  }
  if (!(params.delta > 0.0)) throw std::invalid_argument("IpraParams: delta must be > 0");
  if (!(params.t_s >= params.delta)) {
    throw std::invalid_argument("IpraParams: t_s must be >= delta");
  }
  integral_ratio(params.t_s, params.delta, "IpraParams: t_s");
  integral_ratio(params.t_c, params.delta, "IpraParams: t_c");
}

std::int64_t frame_units(const IpraParams& params) {
  return integral_ratio(params.t_s, params.delta, "IpraParams: t_s");
}

std::int64_t collision_units(const IpraParams& params) {
  return integral_ratio(params.t_c, params.delta, "IpraParams: t_c");
}

double local_index(const TerminalState& terminal, double lambda) {
  return whittle(lambda, terminal.a, terminal.d);
}

ContentionOutcome contention_round(std::span<const double> indices, const IpraParams& params,
                                   Stream& rng) {
  validate(params);
  ContentionOutcome out;
  for (std::size_t n = 0; n < indices.size(); ++n) {
    const double idx = indices[n];
    if (idx >= params.index_threshold && idx > 0.0 && rng.bernoulli(params.p)) {
      out.transmitters.push_back(static_cast<int>(n));
    }
  }
  if (out.transmitters.size() == 1) {
    out.kind = ContentionOutcome::Kind::success;
    out.winner = out.transmitters.front();
    out.elapsed_units = 1 + frame_units(params);
  } else if (out.transmitters.size() >= 2) {
    out.kind = ContentionOutcome::Kind::collision;
    out.elapsed_units = 1 + collision_units(params);
  } else {
    out.kind = ContentionOutcome::Kind::idle;
    out.elapsed_units = 1;
  }
  return out;
}

double overhead_fraction(std::span<const ContentionOutcome> trace) {
  if (trace.empty()) throw std::invalid_argument("overhead_fraction: empty trace");
  std::int64_t success_units = 0;
  std::int64_t total_units = 0;
  for (const auto& round : trace) {
    total_units += round.elapsed_units;
    if (round.kind == ContentionOutcome::Kind::success) {
      success_units += round.elapsed_units - 1;
    }
  }
  return static_cast<double>(success_units) / static_cast<double>(total_units);
}

IpraOptimum optimize_params(const Scenario& scenario, const IpraSearchRange& range, int budget) {
  if (!(range.p_min > 0.0) || range.p_min > range.p_max || range.p_max > 1.0) {
    throw std::invalid_argument("IpraSearchRange: need 0 < p_min <= p_max <= 1");
  }
  if (!(range.threshold_min >= 0.0) || range.threshold_min > range.threshold_max) {
    throw std::invalid_argument("IpraSearchRange: need 0 <= threshold_min <= threshold_max");
  }
  if (budget < 20) throw std::invalid_argument("optimize_params: budget must be >= 20");

  Scenario probe_sc = scenario;
  probe_sc.policy = PolicyKind::ipra;
  probe_sc.replications = 1;
  if (!probe_sc.ipra) probe_sc.ipra = IpraParams{};

  const auto objective = [&probe_sc](double threshold, double p) {
    Scenario sc = probe_sc;
    sc.ipra->p = p;
    sc.ipra->index_threshold = threshold;
    return run(sc).mean_aoi;
  };

  const PlaneSearchResult found = minimize_unimodal_2d(
      objective, range.threshold_min, range.threshold_max, range.p_min, range.p_max, budget);

  IpraOptimum best;
  best.params = *probe_sc.ipra;
  best.params.index_threshold = found.x;
  best.params.p = found.y;
  best.fallback_grid = found.fallback_grid;
  best.evaluations = found.evaluations;

  Scenario final_sc = scenario;
  final_sc.policy = PolicyKind::ipra;
  if (!final_sc.ipra) final_sc.ipra = IpraParams{};
  final_sc.ipra->p = best.params.p;
  final_sc.ipra->index_threshold = best.params.index_threshold;
  const SimReport report = run_replications(final_sc);
  best.mean_aoi = report.mean_aoi;
  best.std_error = report.std_error;
  return best;
}

}  // namespace aoisim
