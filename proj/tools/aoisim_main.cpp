#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "aoi/config.hpp"
#include "aoi/csv.hpp"
#include "aoi/ipra.hpp"
#include "aoi/mdp.hpp"
#include "aoi/presets.hpp"
#include "aoi/simulator.hpp"
#include "aoi/whittle.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw aoisim::ConfigError("cannot write '" + path + "'");
  return out;
}

void print_report(const aoisim::Scenario& sc, const aoisim::SimReport& report) {
  std::cout << "policy " << aoisim::to_string(sc.policy) << ", " << sc.n_terminals
            << " terminal(s), horizon " << sc.horizon << ", warmup " << aoisim::resolved_warmup(sc)
            << ", seed " << sc.seed << ", replications " << report.replications << "\n";
  std::cout << "mean AoI: " << aoisim::format_double(report.mean_aoi);
  if (report.std_error) std::cout << " +/- " << aoisim::format_double(*report.std_error);
  std::cout << "\n";
  std::cout << "per-terminal AoI:";
  for (const double v : report.per_terminal_aoi) std::cout << ' ' << aoisim::format_double(v);
  std::cout << "\n";
  std::cout << "rounds: " << report.measured_rounds << " (success " << report.success_count
            << ", collision " << report.collision_count << ", idle " << report.idle_count << ")\n";
  if (report.overhead_fraction) {
    std::cout << "overhead fraction: " << aoisim::format_double(*report.overhead_fraction) << "\n";
  }
}

void write_report_csv(const aoisim::Scenario& sc, const aoisim::SimReport& report,
                      const std::string& path) {
  auto out = open_out(path);
  out << "# aoisim run: " << aoisim::scenario_to_json(sc) << "\n";
  out << "policy,mean_aoi,std_error,successes,collisions,idles,overhead\n";
  out << aoisim::to_string(sc.policy) << ',' << aoisim::format_double(report.mean_aoi) << ','
      << (report.std_error ? aoisim::format_double(*report.std_error) : std::string()) << ','
      << report.success_count << ',' << report.collision_count << ',' << report.idle_count << ','
      << (report.overhead_fraction ? aoisim::format_double(*report.overhead_fraction) : std::string())
      << "\n";
}

struct CommonFlags {
  std::optional<std::int64_t> horizon;
  std::optional<std::int64_t> warmup;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--horizon", flags.horizon, "Override horizon (slots)");
  cmd->add_option("--warmup", flags.warmup, "Override warmup (slots)");
  cmd->add_option("--seed", flags.seed, "Override base seed");
  cmd->add_option("--replications", flags.replications, "Override replication count");
  cmd->add_option("--threads", flags.threads, "Replications run in parallel")
      ->check(CLI::PositiveNumber);
}

void apply_common(aoisim::Scenario& sc, const CommonFlags& flags) {
  if (flags.horizon) sc.horizon = *flags.horizon;
  if (flags.warmup) sc.warmup = *flags.warmup;
  if (flags.seed) sc.seed = *flags.seed;
  if (flags.replications) sc.replications = *flags.replications;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information scheduling simulator"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario config");
  std::string run_config;
  std::string run_out, run_trace, run_dump;
  CommonFlags run_flags;
  run_cmd->add_option("config", run_config, "Scenario JSON file")->required();
  run_cmd->add_option("--out", run_out, "Write a result CSV");
  run_cmd->add_option("--trace", run_trace, "Write the per-slot (or per-round) trace CSV");
  run_cmd->add_option("--dump-value-table", run_dump,
                      "Dump the solved joint value table (mdp policy only)");
  add_common(run_cmd, run_flags);

  // preset
  auto* preset_cmd = app.add_subcommand("preset", "Run a named experiment preset");
  std::string preset_name, preset_out;
  CommonFlags preset_flags;
  std::vector<double> preset_lambda_grid;
  std::vector<int> preset_n_grid;
  std::optional<double> preset_lambda, preset_lambda2;
  std::optional<int> preset_budget;
  preset_cmd->add_option("name", preset_name, "fig3-symmetric | fig3-hetero | fig4-largeN | fig5-index-compare")
      ->required();
  preset_cmd->add_option("--out", preset_out, "Output CSV path (default: <name>.csv)");
  preset_cmd->add_option("--lambda-grid", preset_lambda_grid, "Swept arrival rates")
      ->delimiter(',');
  preset_cmd->add_option("--n-grid", preset_n_grid, "Swept terminal counts")->delimiter(',');
  preset_cmd->add_option("--lambda", preset_lambda, "Uniform arrival rate (fig4-largeN)");
  preset_cmd->add_option("--lambda2", preset_lambda2, "Fixed second rate (fig3-hetero)");
  preset_cmd->add_option("--ipra-budget", preset_budget, "IPRA tuning evaluations per point");
  add_common(preset_cmd, preset_flags);

  // index-table
  auto* index_cmd = app.add_subcommand("index-table", "Emit a Whittle index grid as CSV");
  double index_lambda = 0.5;
  std::int64_t index_a_max = 4, index_d_max = 30;
  std::string index_out;
  index_cmd->add_option("--lambda", index_lambda, "Arrival rate")->required();
  index_cmd->add_option("--a-max", index_a_max, "Largest packet age");
  index_cmd->add_option("--d-max", index_d_max, "Largest AoI gap");
  index_cmd->add_option("--out", index_out, "Output CSV path (default: stdout)");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario config");
  std::string validate_config;
  validate_cmd->add_option("config", validate_config, "Scenario JSON file")->required();

  // optimize-ipra
  auto* opt_cmd = app.add_subcommand("optimize-ipra", "Tune IPRA (p, index threshold)");
  std::string opt_config, opt_out;
  CommonFlags opt_flags;
  aoisim::IpraSearchRange opt_range;
  int opt_budget = 120;
  opt_cmd->add_option("config", opt_config, "Scenario JSON file")->required();
  opt_cmd->add_option("--p-min", opt_range.p_min, "Lower transmission probability");
  opt_cmd->add_option("--p-max", opt_range.p_max, "Upper transmission probability");
  opt_cmd->add_option("--threshold-min", opt_range.threshold_min, "Lower index threshold");
  opt_cmd->add_option("--threshold-max", opt_range.threshold_max, "Upper index threshold");
  opt_cmd->add_option("--budget", opt_budget, "Simulation evaluations for the search");
  opt_cmd->add_option("--out", opt_out, "Write the tuned parameters as CSV");
  add_common(opt_cmd, opt_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) {
      aoisim::Scenario sc = aoisim::load_scenario(run_config);
      apply_common(sc, run_flags);
      const auto diags = aoisim::validate_scenario(sc);
      if (!diags.empty()) {
        for (const auto& d : diags) std::cerr << "error: " << d << "\n";
        return kExitConfig;
      }
      aoisim::SimReport report;
      if (!run_trace.empty()) {
        auto trace = open_out(run_trace);
        report = sc.policy == aoisim::PolicyKind::ipra ? aoisim::run_with_round_trace(sc, trace)
                                                    : aoisim::run_with_trace(sc, trace);
      } else {
        report = aoisim::run_replications(sc, run_flags.threads);
      }
      if (!run_dump.empty()) {
        if (sc.policy != aoisim::PolicyKind::mdp_optimal) {
          throw aoisim::ConfigError("--dump-value-table: only meaningful for the mdp policy");
        }
        const aoisim::JointTable table = aoisim::solve_joint(sc.lambdas, sc.mdp_trunc);
        auto dump = open_out(run_dump);
        aoisim::write_csv(table, dump);
      }
      print_report(sc, report);
      if (!run_out.empty()) write_report_csv(sc, report, run_out);
      return kExitOk;
    }

    if (*preset_cmd) {
      aoisim::PresetOverrides ov;
      ov.horizon = preset_flags.horizon;
      ov.warmup = preset_flags.warmup;
      ov.seed = preset_flags.seed;
      ov.replications = preset_flags.replications;
      ov.threads = preset_flags.threads;
      if (!preset_lambda_grid.empty()) ov.lambda_grid = preset_lambda_grid;
      if (!preset_n_grid.empty()) ov.n_grid = preset_n_grid;
      ov.lambda = preset_lambda;
      ov.lambda2 = preset_lambda2;
      ov.ipra_budget = preset_budget;
      const aoisim::PresetResult result = aoisim::run_preset(preset_name, ov);
      const std::string path = preset_out.empty() ? preset_name + ".csv" : preset_out;
      auto out = open_out(path);
      aoisim::write_csv(result, out);
      std::cout << "wrote " << (result.rows.empty() ? result.index_rows.size() : result.rows.size())
                << " rows to " << path << "\n";
      return kExitOk;
    }

    if (*index_cmd) {
      const auto rows = aoisim::index_table(index_lambda, index_a_max, index_d_max);
      if (index_out.empty()) {
        aoisim::write_index_csv(rows, std::cout);
      } else {
        auto out = open_out(index_out);
        aoisim::write_index_csv(rows, out);
      }
      return kExitOk;
    }

    if (*validate_cmd) {
      std::ifstream in(validate_config);
      if (!in) {
        std::cerr << "error: cannot read '" << validate_config << "'\n";
        return kExitConfig;
      }
      std::stringstream buf;
      buf << in.rdbuf();
      const auto diags = aoisim::lint_scenario(buf.str());
      if (diags.empty()) {
        std::cout << "ok\n";
        return kExitOk;
      }
      for (const auto& d : diags) std::cerr << "error: " << d << "\n";
      return kExitConfig;
    }

    if (*opt_cmd) {
      aoisim::Scenario sc = aoisim::load_scenario(opt_config);
      apply_common(sc, opt_flags);
      const aoisim::IpraOptimum best = aoisim::optimize_params(sc, opt_range, opt_budget);
      std::cout << "p: " << aoisim::format_double(best.params.p)
                << "\nindex_threshold: " << aoisim::format_double(best.params.index_threshold)
                << "\nmean AoI: " << aoisim::format_double(best.mean_aoi);
      if (best.std_error) std::cout << " +/- " << aoisim::format_double(*best.std_error);
      std::cout << "\nevaluations: " << best.evaluations
                << (best.fallback_grid ? "\nnote: unimodal search failed, grid fallback used" : "")
                << "\n";
      if (!opt_out.empty()) {
        auto out = open_out(opt_out);
        out << "p,index_threshold,mean_aoi,std_error,evaluations,fallback_grid\n";
        out << aoisim::format_double(best.params.p) << ','
            << aoisim::format_double(best.params.index_threshold) << ','
            << aoisim::format_double(best.mean_aoi) << ','
            << (best.std_error ? aoisim::format_double(*best.std_error) : std::string()) << ','
            << best.evaluations << ',' << (best.fallback_grid ? 1 : 0) << "\n";
      }
      return kExitOk;
    }
  } catch (const aoisim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
