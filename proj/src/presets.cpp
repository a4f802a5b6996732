#include "aoi/presets.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "aoi/csv.hpp"
#include "aoi/ipra.hpp"
#include "aoi/whittle.hpp"

namespace aoisim {

namespace {

using nlohmann::json;

constexpr std::int64_t kDefaultHorizon = 1'000'000;

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

ResultRow row_from_report(const std::string& preset, const std::string& sweep_name,
                          double sweep_value, std::string_view policy, const SimReport& report) {
  ResultRow row;
  row.preset = preset;
  row.sweep_name = sweep_name;
  row.sweep_value = sweep_value;
  row.policy = std::string(policy);
  row.mean_aoi = report.mean_aoi;
  row.std_error = report.std_error;
  row.successes = report.success_count;
  row.collisions = report.collision_count;
  row.idles = report.idle_count;
  row.overhead = report.overhead_fraction;
  return row;
}

Scenario base_scenario(const PresetOverrides& ov) {
  Scenario sc;
  sc.horizon = ov.horizon.value_or(kDefaultHorizon);
  sc.warmup = ov.warmup;
  sc.seed = ov.seed.value_or(1);
  sc.replications = ov.replications.value_or(1);
  return sc;
}

json config_json(const std::string& name, const PresetOverrides& ov, const Scenario& sc) {
  json j;
  j["preset"] = name;
  j["horizon"] = sc.horizon;
  j["warmup"] = resolved_warmup(sc);
  j["seed"] = sc.seed;
  j["replications"] = sc.replications;
  if (ov.lambda_grid) j["lambda_grid"] = *ov.lambda_grid;
  if (ov.n_grid) j["n_grid"] = *ov.n_grid;
  if (ov.lambda) j["lambda"] = *ov.lambda;
  if (ov.lambda2) j["lambda2"] = *ov.lambda2;
  if (ov.ipra_budget) j["ipra_budget"] = *ov.ipra_budget;
  return j;
}

PresetResult preset_two_terminal(const std::string& name, const PresetOverrides& ov,
                                 bool symmetric) {
  PresetResult result;
  result.name = name;
  const std::vector<double> grid = ov.lambda_grid.value_or(default_lambda_grid());
  const double lambda2 = ov.lambda2.value_or(0.5);
  Scenario sc = base_scenario(ov);
  sc.n_terminals = 2;

  json prov = config_json(name, ov, sc);
  prov["policies"] = {"mdp", "whittle-1buf", "whittle-0buf"};
  if (!symmetric) prov["lambda2"] = lambda2;
  result.resolved_config = prov.dump();

  const std::string sweep_name = symmetric ? "lambda" : "lambda1";
  for (const double lam : grid) {
    sc.lambdas = symmetric ? ArrivalRates{lam, lam} : ArrivalRates{lam, lambda2};
    for (const PolicyKind kind :
         {PolicyKind::mdp_optimal, PolicyKind::whittle_one_buffer, PolicyKind::whittle_no_buffer}) {
      sc.policy = kind;
      const SimReport report = run_replications(sc, ov.threads);
      result.rows.push_back(row_from_report(name, sweep_name, lam, to_string(kind), report));
    }
  }
  return result;
}

PresetResult preset_large_n(const std::string& name, const PresetOverrides& ov) {
  PresetResult result;
  result.name = name;
  const std::vector<int> n_grid = ov.n_grid.value_or(std::vector<int>{2, 5, 10, 20, 50});
  const double lambda = ov.lambda.value_or(0.2);
  const int budget = ov.ipra_budget.value_or(60);
  Scenario sc = base_scenario(ov);

  json prov = config_json(name, ov, sc);
  prov["lambda"] = lambda;
  prov["policies"] = {"whittle-1buf", "whittle-0buf", "rr-one", "ipra"};
  prov["ipra_budget"] = budget;
  result.resolved_config = prov.dump();

  for (const int n : n_grid) {
    sc.n_terminals = n;
    sc.lambdas.assign(static_cast<std::size_t>(n), lambda);
    for (const PolicyKind kind :
         {PolicyKind::whittle_one_buffer, PolicyKind::whittle_no_buffer, PolicyKind::rr_one}) {
      sc.policy = kind;
      const SimReport report = run_replications(sc, ov.threads);
      result.rows.push_back(
          row_from_report(name, "n", static_cast<double>(n), to_string(kind), report));
    }

    // IPRA is tuned per sweep point on a shortened probe horizon, then the
    // winning pair is run at full length.
    Scenario tune = sc;
    tune.policy = PolicyKind::ipra;
    tune.ipra = IpraParams{};
    tune.horizon = std::min<std::int64_t>(sc.horizon, 200'000);
    IpraSearchRange range;
    range.threshold_max = whittle(lambda, 1, 2 * n + static_cast<std::int64_t>(2.0 / lambda));
    const IpraOptimum tuned = optimize_params(tune, range, budget);

    Scenario final_sc = sc;
    final_sc.policy = PolicyKind::ipra;
    final_sc.ipra = tuned.params;
    const SimReport report = run_replications(final_sc, ov.threads);
    result.rows.push_back(
        row_from_report(name, "n", static_cast<double>(n), to_string(PolicyKind::ipra), report));
  }
  return result;
}

PresetResult preset_index_compare(const std::string& name, const PresetOverrides& ov) {
  PresetResult result;
  result.name = name;
  const std::vector<double> grid = ov.lambda_grid.value_or(std::vector<double>{0.3, 0.5, 0.8});

  json prov;
  prov["preset"] = name;
  prov["lambda_grid"] = grid;
  prov["a_max"] = 4;
  prov["d_max"] = 30;
  result.resolved_config = prov.dump();

  for (const double lam : grid) {
    const auto rows = index_table(lam, 4, 30);
    result.index_rows.insert(result.index_rows.end(), rows.begin(), rows.end());
  }
  return result;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig3-symmetric", "fig3-hetero", "fig4-largeN", "fig5-index-compare"};
}

PresetResult run_preset(const std::string& name, const PresetOverrides& ov) {
  if (name == "fig3-symmetric") return preset_two_terminal(name, ov, true);
  if (name == "fig3-hetero") return preset_two_terminal(name, ov, false);
  if (name == "fig4-largeN") return preset_large_n(name, ov);
  if (name == "fig5-index-compare") return preset_index_compare(name, ov);
  throw ConfigError("unknown preset '" + name + "'; available: fig3-symmetric, fig3-hetero, "
                    "fig4-largeN, fig5-index-compare");
}

void write_csv(const PresetResult& result, std::ostream& out) {
  out << "# aoisim preset: " << result.resolved_config << "\n";
  if (!result.index_rows.empty()) {
    write_index_csv(result.index_rows, out);
    return;
  }
  out << "preset,sweep,sweep_value,policy,mean_aoi,std_error,successes,collisions,idles,overhead\n";
  for (const auto& row : result.rows) {
    out << row.preset << ',' << row.sweep_name << ',' << format_double(row.sweep_value) << ','
        << row.policy << ',' << format_double(row.mean_aoi) << ','
        << (row.std_error ? format_double(*row.std_error) : std::string()) << ','
        << row.successes << ',' << row.collisions << ',' << row.idles << ','
        << (row.overhead ? format_double(*row.overhead) : std::string()) << "\n";
  }
}

std::vector<IndexRow> index_table(double lambda, std::int64_t a_max, std::int64_t d_max) {
  if (a_max < 1 || d_max < 1) {
    throw std::invalid_argument("index_table: bounds must be >= 1");
  }
  std::vector<IndexRow> rows;
  rows.reserve(static_cast<std::size_t>(a_max * (d_max + 1)));
  for (std::int64_t a = 1; a <= a_max; ++a) {
    for (std::int64_t d = 0; d <= d_max; ++d) {
      IndexRow row;
      row.lambda = lambda;
      row.a = a;
      row.d = d;
      row.h = a + d;
      row.index_one_buffer = whittle(lambda, a, d);
      row.index_no_buffer = whittle(lambda, 1, row.h - 1);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_index_csv(std::span<const IndexRow> rows, std::ostream& out) {
  out << "lambda,a,d,h,index_one_buffer,index_no_buffer\n";
  for (const auto& row : rows) {
    out << format_double(row.lambda) << ',' << row.a << ',' << row.d << ',' << row.h << ','
        << format_double(row.index_one_buffer) << ',' << format_double(row.index_no_buffer)
        << "\n";
  }
}

}  // namespace aoisim
