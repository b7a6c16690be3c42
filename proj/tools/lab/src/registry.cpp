#include "cartan/lab/registry.hpp"

#include "cartan/connection.hpp"

#include <cmath>
#include <limits>

namespace cartan::lab {

namespace {

double param(const nlohmann::json& params, const nlohmann::json& defaults, const char* key) {
  return params.contains(key) ? params.at(key).get<double>() : defaults.at(key).get<double>();
}

LabModel finish(std::string id, ModelWithConnection mc) {
  LabModel m;
  m.id = std::move(id);
  m.model = mc.model;
  m.connection = verified(mc.connection);
  return m;
}

LabModel iso_model(const std::string& id, const MetricChart& metric, double half_width, bool flat) {
  IsoJetModel iso = make_isometry_jet_groupoid(metric, Box::cube(2, half_width), id);
  LabModel m = finish(id, {iso.model, iso.connection});
  m.geometry = iso.geometry;
  m.expect_flat = flat;
  return m;
}

LabModel gauge_model(const std::string& id, const ClassicalCartan& w, VBracket lie, VBracket model_data,
                     bool curved) {
  LabModel m = finish(id, classical_to_groupoid(w));
  m.classical = w;
  m.lie_bracket = std::move(lie);
  m.model_bracket = std::move(model_data);
  m.model_data_curved = curved;
  return m;
}

std::vector<ModelInfo> build_models() {
  using nlohmann::json;
  std::vector<ModelInfo> out;
  out.push_back({"pair-R2", {}, "pair groupoid of a square in R^2 with the chart-translation connection",
                 json{{"half_width", 1.0}}, [](const json& p) {
                   const json d{{"half_width", 1.0}};
                   return finish("pair-R2", make_pair_groupoid(Box::cube(2, param(p, d, "half_width"))));
                 }});
  out.push_back({"translation-R2", {}, "translations of R^2 acting on R^2, constant-bisection connection",
                 json{{"half_width", 1.0}}, [](const json& p) {
                   const json d{{"half_width", 1.0}};
                   return finish("translation-R2",
                                 make_action_groupoid(translation_action(2, param(p, d, "half_width"))));
                 }});
  out.push_back({"se2-action", {}, "SE(2) acting on the plane, constant-bisection connection",
                 json{{"half_width", 1.0}}, [](const json& p) {
                   const json d{{"half_width", 1.0}};
                   return finish("se2-action", make_action_groupoid(se2_action(param(p, d, "half_width"))));
                 }});
  out.push_back({"so3-sphere", {}, "SO(3) acting on the stereographic chart of the sphere",
                 json{{"half_width", 0.5}}, [](const json& p) {
                   const json d{{"half_width", 0.5}};
                   return finish("so3-sphere",
                                 make_action_groupoid(so3_sphere_action(param(p, d, "half_width"))));
                 }});
  out.push_back({"gauge-se2-so2", {"se2-so2"},
                 "gauge groupoid of SE(2) -> SE(2)/SO(2) with the Maurer-Cartan connection", json::object(),
                 [](const json&) {
                   return gauge_model("gauge-se2-so2", maurer_cartan_se2(), se2_bracket, se2_bracket, false);
                 }});
  out.push_back({"gauge-so3-so2", {"so3-so2"},
                 "gauge groupoid of SO(3) -> S^2 with the Maurer-Cartan connection; model data bracket se(2)",
                 json::object(), [](const json&) {
                   return gauge_model("gauge-so3-so2", maurer_cartan_so3(), so3_bracket, se2_bracket, true);
                 }});
  out.push_back({"isojet-flat", {}, "isometric tangent maps of the Euclidean plane, prolongation connection",
                 json{{"half_width", 1.0}}, [](const json& p) {
                   const json d{{"half_width", 1.0}};
                   return iso_model("isojet-flat", euclidean_metric(), param(p, d, "half_width"), true);
                 }});
  out.push_back({"isojet-sphere", {}, "isometric tangent maps of the round sphere (stereographic chart)",
                 json{{"half_width", 0.6}}, [](const json& p) {
                   const json d{{"half_width", 0.6}};
                   return iso_model("isojet-sphere", sphere_metric(), param(p, d, "half_width"), true);
                 }});
  out.push_back({"isojet-hyperbolic", {}, "isometric tangent maps of the hyperbolic disc (Poincare chart)",
                 json{{"half_width", 0.4}}, [](const json& p) {
                   const json d{{"half_width", 0.4}};
                   return iso_model("isojet-hyperbolic", hyperbolic_metric(), param(p, d, "half_width"), true);
                 }});
  out.push_back({"isojet-perturbed", {}, "isometric tangent maps of the metric (1 + eps x1^2) delta (not flat)",
                 json{{"eps", 1.0}, {"half_width", 0.5}}, [](const json& p) {
                   const json d{{"eps", 1.0}, {"half_width", 0.5}};
                   return iso_model("isojet-perturbed", perturbed_metric(param(p, d, "eps")),
                                    param(p, d, "half_width"), false);
                 }});
  return out;
}

}  // namespace

const std::vector<ModelInfo>& model_registry() {
  static const std::vector<ModelInfo> models = build_models();
  return models;
}

const ModelInfo* find_model(const std::string& name) {
  for (const auto& m : model_registry()) {
    if (m.name == name) return &m;
    for (const auto& a : m.aliases) {
      if (a == name) return &m;
    }
  }
  return nullptr;
}

LabModel make_model(const std::string& name, const nlohmann::json& params) {
  const ModelInfo* info = find_model(name);
  if (!info) throw ConfigError("unknown model '" + name + "'");
  return info->make(params);
}

const ExperimentInfo* find_experiment(const std::string& name) {
  for (const auto& e : experiment_registry()) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

ExperimentContext::ExperimentContext(const LabModel& model, const ExperimentInfo& info, std::uint64_t seed,
                                     int samples, std::map<std::string, double> overrides)
    : model_(model), info_(info), seed_(seed), samples_(samples), overrides_(std::move(overrides)) {}

const CheckSpec& ExperimentContext::spec(const std::string& check) const {
  for (const auto& s : info_.checks) {
    if (s.name == check) return s;
  }
  throw ConfigError("experiment " + info_.name + " has no check '" + check + "'");
}

double ExperimentContext::tolerance(const std::string& check) const {
  const auto it = overrides_.find(check);
  return it != overrides_.end() ? it->second : spec(check).tolerance;
}

std::uint64_t ExperimentContext::seed_for(const std::string& check) const {
  // FNV-1a of the check name mixed into the run seed.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : check) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return seed_ ^ h;
}

void ExperimentContext::add(const std::string& check, int samples, double value, const std::string& note) {
  CheckRecord r;
  r.name = check;
  r.samples = samples;
  r.max_error = value;
  r.tolerance = tolerance(check);
  r.bound = spec(check).bound;
  r.pass = std::isfinite(value) && (r.bound == Bound::Upper ? value <= r.tolerance : value >= r.tolerance);
  r.note = note;
  records_.push_back(std::move(r));
}

void ExperimentContext::fail(const std::string& check, const std::string& note) {
  CheckRecord r;
  r.name = check;
  r.max_error = std::numeric_limits<double>::infinity();
  r.tolerance = tolerance(check);
  r.bound = spec(check).bound;
  r.pass = false;
  r.note = note;
  records_.push_back(std::move(r));
}

Report run(const ExperimentConfig& config) {
  const ExperimentInfo* exp = find_experiment(config.experiment);
  if (!exp) throw ConfigError("unknown experiment '" + config.experiment + "'");
  const ModelInfo* info = find_model(config.model);
  if (!info) throw ConfigError("unknown model '" + config.model + "'");

  LabModel model;
  try {
    model = info->make(config.model_params);
  } catch (const Error& e) {
    throw ConfigError("model " + info->name + " cannot be built with these parameters: " + e.what());
  }
  const std::string reason = exp->requirement ? exp->requirement(model) : std::string{};
  if (!reason.empty()) throw ConfigError("experiment " + exp->name + " does not apply to " + info->name + ": " + reason);

  Report report;
  report.experiment = exp->name;
  report.model = info->name;
  report.seed = config.seed;
  report.sample_count = config.sample_count.value_or(exp->default_samples);
  report.environment = environment_fingerprint();

  ExperimentContext ctx(model, *exp, config.seed, report.sample_count, config.tolerances);
  if (!model.connection.record.verified) {
    CheckRecord r;
    r.name = "multiplicativity-precondition";
    r.samples = model.connection.record.samples;
    r.max_error = model.connection.record.max_error;
    r.tolerance = model.connection.record.tolerance;
    r.note = "connection failed the multiplicativity check; experiment skipped";
    report.checks.push_back(r);
  } else {
    try {
      exp->run(ctx);
      report.checks = ctx.take();
    } catch (const std::exception& e) {
      report.checks = ctx.take();
      CheckRecord r;
      r.name = "experiment-error";
      r.max_error = std::numeric_limits<double>::quiet_NaN();
      r.note = e.what();
      report.checks.push_back(r);
    }
  }
  report.verdict = conjunction(report.checks);
  return report;
}

std::string serialize(const Report& r, Format f) { return f == Format::Json ? to_json(r) : to_csv(r); }

std::string report_filename(const Report& r, Format f) {
  return r.experiment + "_" + r.model + "_" + std::to_string(r.seed) + "." + format_name(f);
}

}  // namespace cartan::lab
