#include "cartan/lab/config.hpp"

#include "cartan/lab/registry.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace cartan::lab {

namespace {

void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const nlohmann::json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

}  // namespace

Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  throw ConfigError("unknown format '" + s + "' (expected json or csv)");
}

const char* format_name(Format f) { return f == Format::Json ? "json" : "csv"; }

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"model", "experiment", "seed", "sample_count", "tolerances", "output", "format"}, "config");
  ExperimentConfig c;

  if (!j.contains("model")) throw ConfigError("config.model is required");
  const auto& model = j.at("model");
  if (model.is_string()) {
    c.model = model.get<std::string>();
  } else if (model.is_object()) {
    reject_unknown(model, {"name", "params"}, "config.model");
    c.model = get<std::string>(model, "name", "config.model");
    if (model.contains("params")) c.model_params = model.at("params");
  } else {
    throw ConfigError("config.model must be a name or {name, params}");
  }
  const ModelInfo* info = find_model(c.model);
  if (!info) throw ConfigError("unknown model '" + c.model + "'");
  if (!c.model_params.is_object()) throw ConfigError("config.model.params must be an object");
  for (const auto& [key, value] : c.model_params.items()) {
    if (!info->defaults.contains(key)) throw ConfigError("unknown parameter '" + key + "' for model " + info->name);
    if (!value.is_number()) throw ConfigError("parameter '" + key + "' must be a number");
  }

  if (!j.contains("experiment")) throw ConfigError("config.experiment is required");
  c.experiment = get<std::string>(j, "experiment", "config");
  const ExperimentInfo* exp = find_experiment(c.experiment);
  if (!exp) throw ConfigError("unknown experiment '" + c.experiment + "'");

  if (j.contains("seed")) {
    const auto& seed = j.at("seed");
    const bool ok = seed.is_number_unsigned() || (seed.is_number_integer() && seed.get<long long>() >= 0);
    if (!ok) throw ConfigError("config.seed must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("sample_count")) {
    if (!j.at("sample_count").is_number_integer() || j.at("sample_count").get<long long>() < 1) {
      throw ConfigError("config.sample_count must be a positive integer");
    }
    c.sample_count = j.at("sample_count").get<int>();
  }
  if (j.contains("tolerances")) {
    const auto& tol = j.at("tolerances");
    if (!tol.is_object()) throw ConfigError("config.tolerances must be an object");
    for (const auto& [key, value] : tol.items()) {
      const bool known = std::any_of(exp->checks.begin(), exp->checks.end(),
                                     [&key](const CheckSpec& s) { return s.name == key; });
      if (!known) throw ConfigError("unknown check '" + key + "' for experiment " + exp->name);
      if (!value.is_number() || value.get<double>() < 0) {
        throw ConfigError("tolerance '" + key + "' must be a non-negative number");
      }
      c.tolerances[key] = value.get<double>();
    }
  }
  if (j.contains("output")) c.output = get<std::string>(j, "output", "config");
  if (j.contains("format")) c.format = parse_format(get<std::string>(j, "format", "config"));
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
  return parse_config(j);
}

}  // namespace cartan::lab
