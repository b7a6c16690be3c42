// Acceptance runner: one PASS/FAIL line per criterion. With no arguments every
// criterion runs; otherwise only the numbered ones given on the command line.

#include "cartan/lab/registry.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

using namespace cartan::lab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

Report run_one(const std::string& model, const std::string& experiment, int samples, std::uint64_t seed = 42) {
  ExperimentConfig c;
  c.model = model;
  c.experiment = experiment;
  c.seed = seed;
  c.sample_count = samples;
  return run(c);
}

/// Tracks the worst value of named checks across reports against a fixed bound.
class Gate {
 public:
  Gate(std::string label, double tolerance, Bound bound = Bound::Upper)
      : label_(std::move(label)), tol_(tolerance), bound_(bound),
        worst_(bound == Bound::Upper ? 0.0 : INFINITY) {}

  void take(const Report& r, const std::string& check) {
    const CheckRecord* c = r.find(check);
    if (!c) {
      missing_.push_back(r.model + "/" + check);
      return;
    }
    const double v = c->max_error;
    if (!std::isfinite(v)) {
      bad_.push_back(r.model + "/" + check + (c->note.empty() ? "" : " (" + c->note + ")"));
      return;
    }
    const bool ok = bound_ == Bound::Upper ? v <= tol_ : v >= tol_;
    if (!ok) bad_.push_back(r.model + "/" + check);
    if (bound_ == Bound::Upper ? v > worst_ : v < worst_) worst_ = v;
    ++count_;
  }

  void merge_into(Outcome& o) const {
    const bool ok = bad_.empty() && missing_.empty() && count_ > 0;
    o.pass = o.pass && ok;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s%s %.3g (%s %.3g, %d checks)", o.detail.empty() ? "" : "; ", label_.c_str(),
                  worst_, bound_ == Bound::Upper ? "<=" : ">=", tol_, count_);
    o.detail += buf;
    for (const auto& b : bad_) o.detail += " [fail " + b + "]";
    for (const auto& m : missing_) o.detail += " [missing " + m + "]";
  }

 private:
  std::string label_;
  double tol_;
  Bound bound_;
  double worst_;
  int count_ = 0;
  std::vector<std::string> bad_;
  std::vector<std::string> missing_;
};

const std::vector<std::string> kOracleModels{"pair-R2", "se2-action", "gauge-se2-so2", "isojet-sphere"};
const std::vector<std::string> kAllModels{"pair-R2",       "translation-R2", "se2-action",    "so3-sphere",
                                          "gauge-se2-so2", "gauge-so3-so2",  "isojet-flat",   "isojet-sphere",
                                          "isojet-hyperbolic", "isojet-perturbed"};

Outcome jet_arithmetic() {
  Gate g("jet arithmetic vs oracle", 1e-7);
  for (const auto& m : kOracleModels) {
    const Report r = run_one(m, "jet-axioms", 200);
    for (const char* c : {"jet-invert", "mul-kernel-right", "jet-decompose", "jet-mul"}) g.take(r, c);
  }
  Outcome o;
  g.merge_into(o);
  o.detail += "; 200 samples on " + std::to_string(kOracleModels.size()) + " models";
  return o;
}

Outcome identity_suites() {
  Gate kernel("kernel-product identities", 1e-7);
  Gate semi("semidirect identities", 1e-7);
  Gate vee("kernel embedding equivariance", 1e-7);
  for (const auto& m : kOracleModels) {
    const Report k = run_one(m, "kernel-products", 200);
    for (const char* c : {"right-product", "left-product", "kernel-difference", "conjugation", "right-difference"}) {
      kernel.take(k, c);
    }
    const Report s = run_one(m, "semidirect", 200);
    for (const char* c : {"vee-morphism", "bisection-law", "parts-roundtrip", "product-rule", "horizontal-product"}) {
      semi.take(s, c);
    }
    vee.take(s, "vee-equivariance");
  }
  Outcome o;
  kernel.merge_into(o);
  semi.merge_into(o);
  vee.merge_into(o);
  return o;
}

Outcome flow_vs_transport() {
  Gate g("flow formula vs parallel transport", 1e-4);
  for (const auto& m : kAllModels) g.take(run_one(m, "nabla-compare", 100), "flow-vs-transport");
  Outcome o;
  g.merge_into(o);
  o.detail += "; 100 samples on " + std::to_string(kAllModels.size()) + " models";
  return o;
}

Outcome flatness() {
  Gate curv("curvature", 1e-4);
  Gate tors("torsion", 1e-4);
  for (const char* m : {"translation-R2", "se2-action", "so3-sphere", "isojet-flat", "isojet-sphere"}) {
    const Report r = run_one(m, "flatness", 40);
    curv.take(r, "curvature");
    tors.take(r, "torsion");
  }
  Gate frac("perturbed metric fraction with both norms > 10x tol", 0.8, Bound::Lower);
  frac.take(run_one("isojet-perturbed", "flatness", 40), "non-flat-fraction");
  Outcome o;
  curv.merge_into(o);
  tors.merge_into(o);
  frac.merge_into(o);
  return o;
}

Outcome reconstruction() {
  Gate dim("|dim g0 - rank|", 0.0);
  Gate jacobi("jacobi", 1e-5);
  Gate anchor("anchor homomorphism", 1e-5);
  Gate path("path independence", 1e-4);
  for (const char* m : {"pair-R2", "translation-R2", "se2-action", "so3-sphere", "gauge-se2-so2", "isojet-flat",
                        "isojet-sphere", "isojet-hyperbolic"}) {
    const Report r = run_one(m, "reconstruct", 1);
    dim.take(r, "dimension");
    jacobi.take(r, "jacobi");
    anchor.take(r, "anchor-homomorphism");
    path.take(r, "path-independence");
  }
  Outcome o;
  dim.merge_into(o);
  jacobi.merge_into(o);
  anchor.merge_into(o);
  path.merge_into(o);
  return o;
}

Outcome classical_round_trip() {
  Gate s("S round trip", 1e-6);
  Gate w("omega round trip", 1e-6);
  Gate nabla("induced vs infinitesimalized connection", 1e-4);
  for (const char* m : {"gauge-se2-so2", "gauge-so3-so2", "se2-action"}) {
    const Report r = run_one(m, "classical-bridge", 40);
    s.take(r, "s-roundtrip");
    w.take(r, "omega-roundtrip");
    nabla.take(r, "nabla-classical");
  }
  Outcome o;
  s.merge_into(o);
  w.merge_into(o);
  nabla.merge_into(o);
  return o;
}

Outcome classical_curvature() {
  Gate mc("Maurer-Cartan |Omega|", 1e-6);
  Gate flat("induced connection curvature", 1e-4);
  Gate cc("covariant derivative of Omega (model data)", 1e-4);
  Gate curved("|Omega| under model data", 1e-2, Bound::Lower);
  for (const char* m : {"gauge-se2-so2", "gauge-so3-so2"}) mc.take(run_one(m, "classical-bridge", 20), "maurer-cartan");
  const Report r = run_one("gauge-so3-so2", "classical-bridge", 20);
  flat.take(r, "nabla-flat");
  cc.take(r, "covariant-constancy");
  curved.take(r, "model-data-curvature");
  Outcome o;
  mc.merge_into(o);
  flat.merge_into(o);
  cc.merge_into(o);
  curved.merge_into(o);
  return o;
}

Outcome determinism() {
  Outcome o;
  int compared = 0;
  const std::vector<std::pair<std::string, std::string>> cases{{"pair-R2", "jet-axioms"},
                                                               {"isojet-perturbed", "flatness"},
                                                               {"gauge-so3-so2", "classical-bridge"},
                                                               {"so3-sphere", "nabla-compare"}};
  for (const auto& [model, experiment] : cases) {
    for (Format f : {Format::Json, Format::Csv}) {
      const std::string a = serialize(run_one(model, experiment, 10, 1234), f);
      const std::string b = serialize(run_one(model, experiment, 10, 1234), f);
      ++compared;
      if (a != b) {
        o.pass = false;
        o.detail += " [differs " + model + "/" + experiment + "/" + format_name(f) + "]";
      }
    }
  }
  o.detail = std::to_string(compared) + " report pairs byte-identical" + o.detail;
  return o;
}

struct Criterion {
  int id;
  const char* title;
  Outcome (*check)();
};

const Criterion kCriteria[] = {
    {1, "jet arithmetic agrees with the bisection-jet oracle", jet_arithmetic},
    {2, "kernel-product and semidirect identity suites", identity_suites},
    {3, "flow-formula and parallel-transport connections agree", flow_vs_transport},
    {4, "flat models flat and involutive; perturbed metric detected", flatness},
    {5, "action algebroid reconstruction on flat models", reconstruction},
    {6, "classical and groupoid Cartan connections round trip", classical_round_trip},
    {7, "classical curvature: Maurer-Cartan and covariant constancy", classical_curvature},
    {8, "byte-identical reports for repeated runs", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  bool all = true;
  for (const auto& c : kCriteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s | %s | %s | %.1fs\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
