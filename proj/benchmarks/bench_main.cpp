#include "cartan/curvature.hpp"
#include "cartan/jet_algebra.hpp"
#include "cartan/models.hpp"
#include "cartan/sampling.hpp"

#include <benchmark/benchmark.h>

using namespace cartan;

namespace {

const ModelWithConnection& sphere_jets() {
  static const ModelWithConnection mc = [] {
    IsoJetModel m = make_isometry_jet_groupoid(sphere_metric(), Box::cube(2, 0.6), "isojet-sphere");
    return ModelWithConnection{m.model, m.connection};
  }();
  return mc;
}

struct JetPair {
  Jet1 a;
  Jet1 b;
};

JetPair jet_pair() {
  const GroupoidModel& M = *sphere_jets().model;
  Rng rng(1);
  const auto [g, h] = sample_composable(M, rng, 0.05);
  return {sample_jet(M, rng, g), sample_jet(M, rng, h)};
}

// Closed-form product through the semidirect decomposition.
void BM_JetMulClosedForm(benchmark::State& state) {
  const JetPair p = jet_pair();
  const CartanConnection& s = sphere_jets().connection;
  for (auto _ : state) benchmark::DoNotOptimize(jet_mul(p.a, p.b, s));
}
BENCHMARK(BM_JetMulClosedForm);

// Product through representative bisections and finite differences.
void BM_JetMulOracle(benchmark::State& state) {
  const JetPair p = jet_pair();
  const GroupoidModel& M = *sphere_jets().model;
  for (auto _ : state) benchmark::DoNotOptimize(oracle_jet_mul(M, p.a, p.b));
}
BENCHMARK(BM_JetMulOracle);

void BM_JetInvert(benchmark::State& state) {
  const JetPair p = jet_pair();
  const GroupoidModel& M = *sphere_jets().model;
  for (auto _ : state) benchmark::DoNotOptimize(jet_invert(M, p.a));
}
BENCHMARK(BM_JetInvert);

void BM_Nabla(benchmark::State& state) {
  const auto method = static_cast<Provenance>(state.range(0));
  const ModelWithConnection& mc = sphere_jets();
  const AlgebroidConnection nabla = infinitesimalize(mc.connection, method);
  const ModelPtr mp = mc.model;
  const Section x = [mp](const Vec& y) -> Vec { return algebroid_basis(*mp, y) * Eigen::Vector3d(1.0, y[0], -y[1]); };
  const Vec m = Eigen::Vector2d(0.1, -0.2);
  const Vec v = Eigen::Vector2d(0.3, 0.7);
  state.SetLabel(provenance_name(method));
  for (auto _ : state) benchmark::DoNotOptimize(nabla.nabla(m, v, x));
}
BENCHMARK(BM_Nabla)
    ->Arg(static_cast<int>(Provenance::FlowFormula))
    ->Arg(static_cast<int>(Provenance::ParallelTransport))
    ->Arg(static_cast<int>(Provenance::Linearized));

void BM_Curvature(benchmark::State& state) {
  const AlgebroidConnection nabla = infinitesimalize(sphere_jets().connection, Provenance::Linearized);
  const Vec m = Eigen::Vector2d(0.1, -0.2);
  for (auto _ : state) benchmark::DoNotOptimize(curvature(nabla, m).max_abs());
}
BENCHMARK(BM_Curvature)->Unit(benchmark::kMillisecond);

void BM_FrobeniusTorsion(benchmark::State& state) {
  const ModelWithConnection& mc = sphere_jets();
  Rng rng(2);
  const Vec g = sample_arrow(*mc.model, rng, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(frobenius_torsion(mc.connection, g).max_abs());
}
BENCHMARK(BM_FrobeniusTorsion);

}  // namespace
BENCHMARK_MAIN();
