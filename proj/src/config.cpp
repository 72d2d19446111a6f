#include "grg/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "grg/error.hpp"

namespace grg {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::kConfig, what); }

double number(const std::map<std::string, double>& params, const std::string& family,
              const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end()) config_error(family + " model needs parameter '" + key + "'");
  return it->second;
}

WeightModel build_model(const std::string& family, const std::map<std::string, double>& params) {
  static const std::map<std::string, std::set<std::string>> kKeys = {
      {"constant", {"lambda"}},         {"exponential", {"rate"}},
      {"lognormal", {"mu", "sigma"}},   {"gamma", {"shape", "scale"}},
      {"pareto", {"alpha", "xm"}},      {"paretolog", {"alpha", "xm"}},
  };
  const auto known = kKeys.find(family);
  if (known == kKeys.end()) config_error("unknown weight model '" + family + "'");
  for (const auto& [key, value] : params) {
    if (!known->second.contains(key)) config_error(family + " model has no parameter '" + key + "'");
  }
  auto get = [&](const char* key) { return number(params, family, key); };
  WeightModel model;
  if (family == "constant") model = ConstantWeights{get("lambda")};
  else if (family == "exponential") model = ExponentialWeights{get("rate")};
  else if (family == "lognormal") model = LogNormalWeights{get("mu"), get("sigma")};
  else if (family == "gamma") model = GammaWeights{get("shape"), get("scale")};
  else if (family == "pareto") model = ParetoWeights{get("alpha"), get("xm")};
  else model = ParetoLogWeights{get("alpha"), get("xm")};
  validate(model);
  return model;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

WeightModel parse_model_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string family = spec.substr(0, colon);
  std::map<std::string, double> params;
  if (colon != std::string::npos) {
    std::stringstream rest(spec.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) config_error("model parameter '" + item + "' is not key=value");
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != value.size()) config_error("model parameter '" + item + "' is not numeric");
      params[key] = v;
    }
  }
  return build_model(family, params);
}

json to_json(const WeightModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ConstantWeights>) return {{"type", "constant"}, {"lambda", m.lambda}};
        if constexpr (std::is_same_v<M, ExponentialWeights>) return {{"type", "exponential"}, {"rate", m.rate}};
        if constexpr (std::is_same_v<M, LogNormalWeights>)
          return {{"type", "lognormal"}, {"mu", m.mu}, {"sigma", m.sigma}};
        if constexpr (std::is_same_v<M, GammaWeights>)
          return {{"type", "gamma"}, {"shape", m.shape}, {"scale", m.scale}};
        if constexpr (std::is_same_v<M, ParetoWeights>)
          return {{"type", "pareto"}, {"alpha", m.alpha}, {"xm", m.xm}};
        if constexpr (std::is_same_v<M, ParetoLogWeights>)
          return {{"type", "paretolog"}, {"alpha", m.alpha}, {"xm", m.xm}};
      },
      model);
}

WeightModel model_from_json(const json& j) {
  if (j.is_string()) return parse_model_spec(j.get<std::string>());
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    config_error("model must be a spec string or an object with a 'type' field");
  }
  std::map<std::string, double> params;
  for (const auto& [key, value] : j.items()) {
    if (key == "type") continue;
    if (!value.is_number()) config_error("model parameter '" + key + "' must be a number");
    params[key] = value.get<double>();
  }
  return build_model(j.at("type").get<std::string>(), params);
}

json to_json(const StableParams& p) {
  return {{"alpha", p.alpha}, {"beta", p.beta}, {"scale", p.scale}, {"location", p.location}};
}

StableParams stable_from_json(const json& j) {
  if (!j.is_object()) config_error("stable parameters must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "alpha" && key != "beta" && key != "scale" && key != "location") {
      config_error("stable parameters have no field '" + key + "'");
    }
  }
  StableParams p;
  p.alpha = get_or(j, "alpha", p.alpha);
  p.beta = get_or(j, "beta", p.beta);
  p.scale = get_or(j, "scale", p.scale);
  p.location = get_or(j, "location", p.location);
  validate(p);
  return p;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  static const std::set<std::string> kFields = {"model",   "n_grid",   "replications", "master_seed",
                                                "theorem", "sampler",  "t_values",     "pair_draws",
                                                "threads"};
  for (const auto& [key, value] : j.items()) {
    if (!kFields.contains(key)) config_error("unknown config field '" + key + "'");
  }
  for (const char* required : {"model", "n_grid", "replications", "theorem"}) {
    if (!j.contains(required)) config_error(std::string("config is missing '") + required + "'");
  }
  ExperimentConfig c;
  c.model = model_from_json(j.at("model"));
  c.n_grid = get_or<std::vector<std::size_t>>(j, "n_grid", {});
  c.replications = get_or<std::size_t>(j, "replications", 0);
  c.master_seed = get_or<std::uint64_t>(j, "master_seed", 0);
  c.theorem = parse_theorem(get_or<std::string>(j, "theorem", ""));
  c.sampler = parse_sampler(get_or<std::string>(j, "sampler", "fast"));
  c.t_values = get_or<std::vector<double>>(j, "t_values", {1.0});
  c.pair_draws = get_or<std::size_t>(j, "pair_draws", c.pair_draws);
  c.threads = get_or<unsigned>(j, "threads", 0);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j = {
      {"model", to_json(c.model)},
      {"n_grid", c.n_grid},
      {"replications", c.replications},
      {"master_seed", c.master_seed},
      {"theorem", to_string(c.theorem)},
      {"sampler", to_string(c.sampler)},
  };
  if (c.theorem == Theorem::kAudit) {
    j["t_values"] = c.t_values;
    j["pair_draws"] = c.pair_draws;
  }
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    config_error("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace grg
