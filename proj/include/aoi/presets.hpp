#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aoi/simulator.hpp"

namespace aoisim {

// One simulated point of an experiment preset (long format, plot-ready).
struct ResultRow {
  std::string preset;
  std::string sweep_name;
  double sweep_value = 0.0;
  std::string policy;
  double mean_aoi = 0.0;
  std::optional<double> std_error;
  std::uint64_t successes = 0;
  std::uint64_t collisions = 0;
  std::uint64_t idles = 0;
  std::optional<double> overhead;
};

// One grid point of the index comparison: the one-buffer index of (a, d) next
// to the no-buffer index a fresh packet would have at the same AoI.
struct IndexRow {
  double lambda = 0.0;
  std::int64_t a = 0;
  std::int64_t d = 0;
  std::int64_t h = 0;
  double index_one_buffer = 0.0;
  double index_no_buffer = 0.0;
};

struct PresetOverrides {
  std::optional<std::int64_t> horizon;
  std::optional<std::int64_t> warmup;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::optional<std::vector<double>> lambda_grid;
  std::optional<std::vector<int>> n_grid;
  std::optional<double> lambda;   // uniform rate for fig4-largeN
  std::optional<double> lambda2;  // fixed second rate for fig3-hetero
  std::optional<int> ipra_budget;
  int threads = 1;
};

struct PresetResult {
  std::string name;
  std::vector<ResultRow> rows;
  std::vector<IndexRow> index_rows;  // fig5-index-compare only
  std::string resolved_config;       // JSON provenance, embedded in the CSV header
};

std::vector<std::string> preset_names();

// Shipped presets: fig3-symmetric, fig3-hetero, fig4-largeN, fig5-index-compare.
// Throws ConfigError for unknown names or invalid overrides.
PresetResult run_preset(const std::string& name, const PresetOverrides& overrides);

void write_csv(const PresetResult& result, std::ostream& out);

std::vector<IndexRow> index_table(double lambda, std::int64_t a_max, std::int64_t d_max);
void write_index_csv(std::span<const IndexRow> rows, std::ostream& out);

}  // namespace aoisim
