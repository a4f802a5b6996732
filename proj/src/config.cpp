#include "aoi/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace aoisim {

namespace {

using nlohmann::json;

IpraParams parse_ipra(const json& j) {
  IpraParams params;
  for (const auto& [key, value] : j.items()) {
    if (key == "p") {
      params.p = value.get<double>();
    } else if (key == "index_threshold") {
      params.index_threshold = value.get<double>();
    } else if (key == "t_s") {
      params.t_s = value.get<double>();
    } else if (key == "t_c") {
      params.t_c = value.get<double>();
    } else if (key == "delta") {
      params.delta = value.get<double>();
    } else {
      throw ConfigError("ipra: unknown key '" + key + "'");
    }
  }
  return params;
}

TruncationSpec parse_trunc(const json& j) {
  TruncationSpec trunc{32, 32, 1e-7, 200000};
  for (const auto& [key, value] : j.items()) {
    if (key == "a_max") {
      trunc.a_max = value.get<std::int64_t>();
    } else if (key == "d_max") {
      trunc.d_max = value.get<std::int64_t>();
    } else if (key == "tol") {
      trunc.tol = value.get<double>();
    } else if (key == "max_iters") {
      trunc.max_iters = value.get<int>();
    } else {
      throw ConfigError("mdp: unknown key '" + key + "'");
    }
  }
  return trunc;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  Scenario sc;
  double uniform_lambda = 0.0;
  bool have_uniform = false;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "schema_version") {
        if (value.get<int>() != kConfigSchemaVersion) {
          throw ConfigError("schema_version: expected " + std::to_string(kConfigSchemaVersion));
        }
      } else if (key == "terminals") {
        sc.n_terminals = value.get<int>();
      } else if (key == "lambda") {
        uniform_lambda = value.get<double>();
        have_uniform = true;
      } else if (key == "lambdas") {
        sc.lambdas = value.get<std::vector<double>>();
      } else if (key == "policy") {
        const auto name = value.get<std::string>();
        const auto kind = policy_kind_from_string(name);
        if (!kind) throw ConfigError("policy: unknown policy '" + name + "'");
        sc.policy = *kind;
      } else if (key == "horizon") {
        sc.horizon = value.get<std::int64_t>();
      } else if (key == "warmup") {
        sc.warmup = value.get<std::int64_t>();
      } else if (key == "seed") {
        sc.seed = value.get<std::uint64_t>();
      } else if (key == "replications") {
        sc.replications = value.get<int>();
      } else if (key == "ipra") {
        sc.ipra = parse_ipra(value);
      } else if (key == "mdp") {
        sc.mdp_trunc = parse_trunc(value);
      } else {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: type error: ") + e.what());
  }
  if (have_uniform) {
    if (!sc.lambdas.empty()) {
      throw ConfigError("config: give either 'lambda' or 'lambdas', not both");
    }
    sc.lambdas.assign(static_cast<std::size_t>(std::max(sc.n_terminals, 0)), uniform_lambda);
  }
  return sc;
}

std::vector<std::string> lint_scenario(const std::string& json_text) {
  Scenario sc;
  try {
    sc = parse_scenario(json_text);
  } catch (const std::exception& e) {
    return {e.what()};
  }
  return validate_scenario(sc);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario sc = parse_scenario(buf.str());
  const auto diags = validate_scenario(sc);
  if (!diags.empty()) {
    std::string msg = "config '" + path + "' is invalid:";
    for (const auto& d : diags) msg += "\n  " + d;
    throw ConfigError(msg);
  }
  return sc;
}

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["terminals"] = sc.n_terminals;
  j["lambdas"] = sc.lambdas;
  j["policy"] = std::string(to_string(sc.policy));
  j["horizon"] = sc.horizon;
  j["warmup"] = resolved_warmup(sc);
  j["seed"] = sc.seed;
  j["replications"] = sc.replications;
  if (sc.ipra) {
    j["ipra"] = {{"p", sc.ipra->p},
                 {"index_threshold", sc.ipra->index_threshold},
                 {"t_s", sc.ipra->t_s},
                 {"t_c", sc.ipra->t_c},
                 {"delta", sc.ipra->delta}};
  }
  if (sc.policy == PolicyKind::mdp_optimal) {
    j["mdp"] = {{"a_max", sc.mdp_trunc.a_max},
                {"d_max", sc.mdp_trunc.d_max},
                {"tol", sc.mdp_trunc.tol},
                {"max_iters", sc.mdp_trunc.max_iters}};
  }
  return j.dump();
}

}  // namespace aoisim
