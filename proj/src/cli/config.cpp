#include "hetero_spectra/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace hs::cli {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, std::string_view where,
                    std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown field '" + key + "' in " + std::string(where));
  }
}

double get_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(what + " must be finite");
  return d;
}

std::size_t get_count(const json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ConfigError(what + " must be a positive integer");
  }
  return static_cast<std::size_t>(v.get<long long>());
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  reject_unknown(root, "config",
                 {"baseline", "vary", "methods", "replicates", "seed", "tau_rule"});

  ExperimentConfig cfg;
  if (root.contains("baseline")) {
    const json& b = root["baseline"];
    reject_unknown(b, "baseline", {"n", "p", "r", "kappa", "omega"});
    if (b.contains("n")) cfg.baseline.n = get_count(b["n"], "baseline.n");
    if (b.contains("p")) cfg.baseline.p = get_count(b["p"], "baseline.p");
    if (b.contains("r")) cfg.baseline.r = get_count(b["r"], "baseline.r");
    if (b.contains("kappa")) cfg.baseline.kappa = get_number(b["kappa"], "baseline.kappa");
    if (b.contains("omega")) cfg.baseline.omega = get_number(b["omega"], "baseline.omega");
  }

  if (!root.contains("vary")) throw ConfigError("missing field 'vary'");
  const json& vary = root["vary"];
  reject_unknown(vary, "vary", {"param", "values"});
  if (!vary.contains("param") || !vary["param"].is_string()) {
    throw ConfigError("vary.param must be one of n, p, r, kappa, omega");
  }
  const auto param = parse_vary_param(vary["param"].get<std::string>());
  if (!param) {
    throw ConfigError("vary.param '" + vary["param"].get<std::string>() +
                      "' is not one of n, p, r, kappa, omega");
  }
  cfg.vary = *param;
  if (!vary.contains("values") || !vary["values"].is_array() || vary["values"].empty()) {
    throw ConfigError("vary.values must be a nonempty array");
  }
  for (const auto& v : vary["values"]) cfg.values.push_back(get_number(v, "vary.values entry"));

  if (!root.contains("methods") || !root["methods"].is_array() || root["methods"].empty()) {
    throw ConfigError("methods must be a nonempty array");
  }
  for (const auto& m : root["methods"]) {
    if (!m.is_string()) throw ConfigError("methods entries must be strings");
    const auto method = parse_method(m.get<std::string>());
    if (!method) throw ConfigError("unknown method '" + m.get<std::string>() + "'");
    for (Method seen : cfg.methods)
      if (seen == *method) throw ConfigError("duplicate method '" + m.get<std::string>() + "'");
    cfg.methods.push_back(*method);
  }

  if (root.contains("replicates")) {
    cfg.replicates = static_cast<int>(get_count(root["replicates"], "replicates"));
  }
  if (root.contains("seed")) {
    const json& s = root["seed"];
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                   s.get<long long>() < 0)) {
      throw ConfigError("seed must be a nonnegative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (root.contains("tau_rule")) {
    const json& t = root["tau_rule"];
    if (t.is_string()) {
      if (t.get<std::string>() != "sigma_r_sq_over_16") {
        throw ConfigError("tau_rule must be \"sigma_r_sq_over_16\" or a positive number");
      }
    } else {
      const double tau = get_number(t, "tau_rule");
      if (!(tau > 0.0)) throw ConfigError("tau_rule must be positive");
      cfg.tau_rule.explicit_tau = tau;
    }
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  json j;
  j["baseline"] = {{"n", config.baseline.n},
                   {"p", config.baseline.p},
                   {"r", config.baseline.r},
                   {"kappa", config.baseline.kappa},
                   {"omega", config.baseline.omega}};
  j["vary"] = {{"param", std::string(vary_param_name(config.vary))}, {"values", config.values}};
  json methods = json::array();
  for (Method m : config.methods) methods.push_back(std::string(method_tag(m)));
  j["methods"] = methods;
  j["replicates"] = config.replicates;
  j["seed"] = config.seed;
  if (config.tau_rule.explicit_tau) {
    j["tau_rule"] = *config.tau_rule.explicit_tau;
  } else {
    j["tau_rule"] = "sigma_r_sq_over_16";
  }
  return j.dump(2);
}

}  // namespace hs::cli
