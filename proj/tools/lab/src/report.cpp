#include "cartan/lab/report.hpp"

#include "cartan/connection.hpp"
#include "cartan/curvature.hpp"
#include "cartan/groupoid.hpp"
#include "cartan/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace cartan::lab {

namespace {

const char* bound_name(Bound b) { return b == Bound::Upper ? "upper" : "lower"; }

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

const CheckRecord* Report::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

nlohmann::ordered_json environment_fingerprint() {
  nlohmann::ordered_json env;
  env["library_version"] = "0.1.0";
  env["structure_step"] = kStructureDiff.step;
  env["structure_order"] = kStructureDiff.order;
  env["oracle_step"] = kOracleDiff.step;
  env["oracle_order"] = kOracleDiff.order;
  env["transport_t_step"] = InfinitesimalOptions{}.t_step;
  env["curvature_step"] = CurvatureOptions{}.step;
  env["grid_spacing"] = Grid{}.spacing;
  env["grid_half_count"] = Grid{}.half_count;
  env["sample_conditioning"] = kSampleConditioning;
  // Order fixed against the oracle product.
  env["jet_factor_order"] = "mu * phi_check";
  env["rng"] = "mt19937_64, 53-bit doubles";
#if defined(__VERSION__)
  env["compiler"] = __VERSION__;
#endif
  return env;
}

bool conjunction(const std::vector<CheckRecord>& checks) {
  if (checks.empty()) return false;
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::string to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["experiment"] = r.experiment;
  j["model"] = r.model;
  j["seed"] = r.seed;
  j["sample_count"] = r.sample_count;
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["samples"] = c.samples;
    cj["max_error"] = std::isfinite(c.max_error) ? nlohmann::ordered_json(c.max_error)
                                                 : nlohmann::ordered_json(number(c.max_error));
    cj["tolerance"] = c.tolerance;
    cj["bound"] = bound_name(c.bound);
    cj["pass"] = c.pass;
    if (!c.note.empty()) cj["note"] = c.note;
    checks.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks);
  j["environment"] = r.environment;
  j["verdict"] = r.verdict ? "pass" : "fail";
  return j.dump(2) + "\n";
}

std::string to_csv(const Report& r) {
  std::ostringstream out;
  out << "experiment,model,seed,check,samples,max_error,tolerance,bound,pass\n";
  for (const auto& c : r.checks) {
    out << csv_field(r.experiment) << ',' << csv_field(r.model) << ',' << r.seed << ',' << csv_field(c.name)
        << ',' << c.samples << ',' << number(c.max_error) << ',' << number(c.tolerance) << ','
        << bound_name(c.bound) << ',' << (c.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace cartan::lab
