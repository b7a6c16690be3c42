#pragma once

// Named models and experiments of the lab runner.

#include "cartan/classical.hpp"
#include "cartan/lab/config.hpp"
#include "cartan/lab/report.hpp"
#include "cartan/models.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cartan::lab {

struct LabModel {
  std::string id;
  ModelPtr model;
  CartanConnection connection;  ///< carries the multiplicativity record
  bool expect_flat = true;
  /// Classical data for gauge models.
  std::optional<ClassicalCartan> classical;
  VBracket lie_bracket;    ///< bracket of the group whose Maurer-Cartan form is used
  VBracket model_bracket;  ///< bracket prescribed as model data for the curvature form
  bool model_data_curved = false;
  std::shared_ptr<const IsoJetGeometry> geometry;
};

struct ModelInfo {
  std::string name;
  std::vector<std::string> aliases;
  std::string description;
  /// Accepted keys of `params` with their defaults.
  nlohmann::json defaults;
  std::function<LabModel(const nlohmann::json& params)> make;
};

const std::vector<ModelInfo>& model_registry();
const ModelInfo* find_model(const std::string& name);
/// Builds the model and verifies multiplicativity of its connection.
LabModel make_model(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

struct CheckSpec {
  std::string name;
  double tolerance = 0.0;
  Bound bound = Bound::Upper;
};

class ExperimentContext;

struct ExperimentInfo {
  std::string name;
  std::string description;
  int default_samples = 20;
  std::vector<CheckSpec> checks;
  /// Empty when the experiment applies to the model, else the reason it does not.
  std::function<std::string(const LabModel&)> requirement;
  std::function<void(ExperimentContext&)> run;
};

const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo* find_experiment(const std::string& name);

class ExperimentContext {
 public:
  ExperimentContext(const LabModel& model, const ExperimentInfo& info, std::uint64_t seed, int samples,
                    std::map<std::string, double> overrides);

  const LabModel& model() const { return model_; }
  std::uint64_t seed() const { return seed_; }
  int samples() const { return samples_; }
  double tolerance(const std::string& check) const;
  /// Seed for the named check, so checks do not share random streams.
  std::uint64_t seed_for(const std::string& check) const;

  void add(const std::string& check, int samples, double value, const std::string& note = {});
  void fail(const std::string& check, const std::string& note);
  std::vector<CheckRecord> take() { return std::move(records_); }

 private:
  const CheckSpec& spec(const std::string& check) const;

  const LabModel& model_;
  const ExperimentInfo& info_;
  std::uint64_t seed_;
  int samples_;
  std::map<std::string, double> overrides_;
  std::vector<CheckRecord> records_;
};

/// Runs a validated configuration. Numerical failures become failed checks.
Report run(const ExperimentConfig& config);

/// Report serialized in the requested format.
std::string serialize(const Report& r, Format f);
std::string report_filename(const Report& r, Format f);

}  // namespace cartan::lab
