#pragma once

// Experiment configuration read from JSON. Unknown keys, models, experiments,
// model parameters and tolerance names are rejected before any computation.

#include "cartan/errors.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"

namespace cartan::lab {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Format { Json, Csv };

Format parse_format(const std::string& s);
const char* format_name(Format f);

struct ExperimentConfig {
  std::string model;
  nlohmann::json model_params = nlohmann::json::object();
  std::string experiment;
  std::uint64_t seed = 42;
  std::optional<int> sample_count;  ///< experiment default when absent
  std::map<std::string, double> tolerances;
  std::string output;  ///< directory; empty writes nothing
  Format format = Format::Json;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace cartan::lab
