#include "cartan/lab/registry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace cartan::lab;
using nlohmann::json;

namespace {

ExperimentConfig config(const std::string& model, const std::string& experiment, int samples) {
  return parse_config(json{{"model", model}, {"experiment", experiment}, {"seed", 42}, {"sample_count", samples}});
}

}  // namespace

TEST(LabConfig, ParsesFullConfig) {
  const ExperimentConfig c = parse_config(json::parse(R"({
    "model": {"name": "isojet-perturbed", "params": {"eps": 0.5}},
    "experiment": "flatness",
    "seed": 9,
    "sample_count": 12,
    "tolerances": {"curvature": 1e-3},
    "output": "out",
    "format": "csv"
  })"));
  EXPECT_EQ(c.model, "isojet-perturbed");
  EXPECT_DOUBLE_EQ(c.model_params.at("eps").get<double>(), 0.5);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.sample_count.value(), 12);
  EXPECT_DOUBLE_EQ(c.tolerances.at("curvature"), 1e-3);
  EXPECT_EQ(c.format, Format::Csv);
}

TEST(LabConfig, RejectsBadInput) {
  const auto bad = [](const char* text) { return parse_config(json::parse(text)); };
  EXPECT_THROW(bad(R"({"model": "pair-R2", "experiment": "jet-axioms", "colour": 1})"), ConfigError);
  EXPECT_THROW(bad(R"({"model": "klein-bottle", "experiment": "jet-axioms"})"), ConfigError);
  EXPECT_THROW(bad(R"({"model": "pair-R2", "experiment": "everything"})"), ConfigError);
  EXPECT_THROW(bad(R"({"model": "pair-R2", "experiment": "jet-axioms", "seed": -1})"), ConfigError);
  EXPECT_THROW(bad(R"({"model": "pair-R2", "experiment": "jet-axioms", "sample_count": 0})"), ConfigError);
  EXPECT_THROW(bad(R"({"model": "pair-R2", "experiment": "jet-axioms", "tolerances": {"jet-nope": 1}})"),
               ConfigError);
  EXPECT_THROW(bad(R"({"model": "pair-R2", "experiment": "jet-axioms", "tolerances": {"jet-mul": -1}})"),
               ConfigError);
  EXPECT_THROW(bad(R"({"model": {"name": "pair-R2", "params": {"eps": 1}}, "experiment": "jet-axioms"})"),
               ConfigError);
  EXPECT_THROW(bad(R"({"model": "pair-R2", "experiment": "jet-axioms", "format": "xml"})"), ConfigError);
  EXPECT_THROW(bad(R"({"experiment": "jet-axioms"})"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(LabConfig, InapplicableExperimentIsAConfigError) {
  EXPECT_THROW(run(config("pair-R2", "classical-bridge", 2)), ConfigError);
  EXPECT_THROW(run(config("se2-action", "riemannian", 2)), ConfigError);
  EXPECT_THROW(run(parse_config(json::parse(
                   R"({"model": {"name": "isojet-hyperbolic", "params": {"half_width": 1.5}}, "experiment": "riemannian"})"))),
               ConfigError);
}

TEST(LabRegistry, NamesAreUnique) {
  std::set<std::string> names;
  for (const auto& m : model_registry()) {
    EXPECT_TRUE(names.insert(m.name).second) << m.name;
    for (const auto& a : m.aliases) EXPECT_TRUE(names.insert(a).second) << a;
  }
  EXPECT_EQ(model_registry().size(), 10u);
  EXPECT_EQ(experiment_registry().size(), 10u);
  for (const auto& e : experiment_registry()) {
    std::set<std::string> checks;
    for (const auto& c : e.checks) EXPECT_TRUE(checks.insert(c.name).second) << e.name << "/" << c.name;
  }
  EXPECT_EQ(find_model("se2-so2"), find_model("gauge-se2-so2"));
}

TEST(LabRun, JetAxiomsOnPairPasses) {
  const Report r = run(config("pair-R2", "jet-axioms", 20));
  EXPECT_TRUE(r.verdict);
  EXPECT_EQ(r.checks.size(), 9u);
  for (const auto& c : r.checks) EXPECT_EQ(c.samples, 20) << c.name;
}

TEST(LabRun, FlatnessOnTranslationIsFlat) {
  const Report r = run(config("translation-R2", "flatness", 5));
  EXPECT_TRUE(r.verdict);
  ASSERT_NE(r.find("curvature"), nullptr);
  ASSERT_NE(r.find("torsion"), nullptr);
  EXPECT_LE(r.find("curvature")->max_error, 1e-4);
  EXPECT_EQ(r.find("non-flat-fraction"), nullptr);
}

TEST(LabRun, ClassicalBridgeRoundTripOnGaugeModel) {
  const Report r = run(config("se2-so2", "classical-bridge", 5));
  EXPECT_EQ(r.model, "gauge-se2-so2");
  EXPECT_TRUE(r.verdict);
  EXPECT_NE(r.find("s-roundtrip"), nullptr);
  EXPECT_NE(r.find("omega-roundtrip"), nullptr);
}

TEST(LabRun, ToleranceOverrideIsRecordedAndCanFail) {
  ExperimentConfig c = config("se2-action", "inversion", 5);
  c.tolerances["jet-invert"] = 0.0;
  const Report r = run(c);
  const CheckRecord* check = r.find("jet-invert");
  ASSERT_NE(check, nullptr);
  EXPECT_EQ(check->tolerance, 0.0);
  EXPECT_FALSE(check->pass);
  EXPECT_FALSE(r.verdict);
}

TEST(LabRun, LowerBoundCheckDetectsFault) {
  const Report r = run(config("so3-sphere", "multiplicativity", 10));
  const CheckRecord* fault = r.find("fault-injection");
  ASSERT_NE(fault, nullptr);
  EXPECT_EQ(fault->bound, Bound::Lower);
  EXPECT_GT(fault->max_error, 1e-3);
  EXPECT_TRUE(fault->pass);
}

TEST(LabRun, DeterministicBytes) {
  const ExperimentConfig c = config("isojet-sphere", "semidirect", 8);
  EXPECT_EQ(to_json(run(c)), to_json(run(c)));
  EXPECT_EQ(to_csv(run(c)), to_csv(run(c)));
  ExperimentConfig other = c;
  other.seed = 43;
  EXPECT_NE(to_json(run(c)), to_json(run(other)));
}

TEST(LabReport, JsonShape) {
  const Report r = run(config("pair-R2", "inversion", 3));
  const json j = json::parse(to_json(r));
  EXPECT_EQ(j.at("experiment"), "inversion");
  EXPECT_EQ(j.at("model"), "pair-R2");
  EXPECT_EQ(j.at("seed"), 42);
  EXPECT_EQ(j.at("verdict"), "pass");
  EXPECT_TRUE(j.at("environment").contains("rng"));
  EXPECT_TRUE(j.at("environment").contains("grid_spacing"));
  for (const auto& c : j.at("checks")) {
    for (const char* key : {"name", "samples", "max_error", "tolerance", "bound", "pass"}) {
      EXPECT_TRUE(c.contains(key)) << key;
    }
  }
  EXPECT_EQ(report_filename(r, Format::Json), "inversion_pair-R2_42.json");
  EXPECT_EQ(report_filename(r, Format::Csv), "inversion_pair-R2_42.csv");
}

TEST(LabReport, NonFiniteValuesFail) {
  Report r;
  r.experiment = "x";
  r.model = "y";
  CheckRecord c;
  c.name = "broken";
  c.max_error = std::nan("");
  c.tolerance = 1.0;
  r.checks.push_back(c);
  r.verdict = conjunction(r.checks);
  EXPECT_FALSE(r.verdict);
  const json j = json::parse(to_json(r));
  EXPECT_TRUE(j.at("checks")[0].at("max_error").is_string());
  EXPECT_FALSE(conjunction({}));
}

TEST(LabReport, CsvHeaderAndRows) {
  const Report r = run(config("pair-R2", "inversion", 3));
  const std::string csv = to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "experiment,model,seed,check,samples,max_error,tolerance,bound,pass");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), r.checks.size() + 1);
}
