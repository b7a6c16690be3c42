#include "shipped_models.hpp"

#include "cartan/errors.hpp"
#include "cartan/sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cartan;
using cartan::testing::max_abs;

class ConnectionProperties : public ::testing::TestWithParam<cartan::testing::Named> {
 protected:
  ModelPtr model() const { return GetParam().mc.model; }
  const CartanConnection& S() const { return GetParam().mc.connection; }

  Section section(Rng& rng, const Vec& m) const {
    const ModelPtr mp = model();
    const Vec c0 = rng.uniform_vec(mp->algebroid_rank(), 1.0);
    const Mat c1 = rng.uniform_mat(mp->algebroid_rank(), mp->base_dim, 1.0);
    return [mp, c0, c1, m](const Vec& x) -> Vec { return algebroid_basis(*mp, x) * (c0 + c1 * (x - m)); };
  }
};

TEST_P(ConnectionProperties, Multiplicative) {
  const MultiplicativityRecord rec = check_multiplicative(S(), 99, 20);
  EXPECT_TRUE(rec.verified) << rec.max_error;
  EXPECT_EQ(rec.samples, 20);
  EXPECT_LT(rec.max_error, 1e-7);
}

TEST_P(ConnectionProperties, UnitsCarryIdentityJets) {
  Rng rng(31);
  for (int i = 0; i < 10; ++i) {
    const Vec m = sample_base(*model(), rng);
    EXPECT_LT(jet_distance(S().at(model()->unit(m)), identity_jet(*model(), m)), 1e-9);
  }
}

TEST_P(ConnectionProperties, PerturbedConnectionIsRejected) {
  const ModelPtr mp = model();
  const CartanConnection base = S();
  Rng rng(32);
  const Mat c = rng.uniform_mat(mp->algebroid_rank(), mp->base_dim, 0.3);
  CartanConnection bad = base;
  bad.mu = [mp, base, c](const Vec& g) -> Mat {
    const Vec m = mp->target(g);
    return mul_kernel_left(*mp, KernelHom{m, algebroid_basis(*mp, m) * c}, base.at(g)).mu;
  };
  const MultiplicativityRecord rec = check_multiplicative(bad, 99, 20);
  EXPECT_FALSE(rec.verified);
  EXPECT_GT(rec.max_error, 1e-3);
}

TEST_P(ConnectionProperties, InfinitesimalRoutesAgree) {
  const AlgebroidConnection flow = infinitesimalize(S(), Provenance::FlowFormula);
  const AlgebroidConnection transport = infinitesimalize(S(), Provenance::ParallelTransport);
  const AlgebroidConnection linear = infinitesimalize(S(), Provenance::Linearized);
  EXPECT_EQ(flow.provenance, Provenance::FlowFormula);
  Rng rng(33);
  for (int i = 0; i < 8; ++i) {
    const Vec m = sample_base(*model(), rng, 0.1);
    const Vec v = rng.uniform_vec(model()->base_dim, 1.0);
    const Section x = section(rng, m);
    const Vec a = flow.nabla(m, v, x);
    EXPECT_LT(max_abs(a - transport.nabla(m, v, x)), 1e-4);
    EXPECT_LT(max_abs(a - linear.nabla(m, v, x)), 1e-4);
    // The covariant derivative stays in the algebroid.
    EXPECT_NO_THROW(check_algebroid_vec(*model(), AlgebroidVec{m, a}, 1e-7));
  }
}

TEST_P(ConnectionProperties, LeibnizRule) {
  const AlgebroidConnection nabla = infinitesimalize(S(), Provenance::Linearized);
  Rng rng(34);
  const Vec m = sample_base(*model(), rng, 0.1);
  const Vec v = rng.uniform_vec(model()->base_dim, 1.0);
  const Section x = section(rng, m);
  const Section fx = [x](const Vec& y) -> Vec { return std::exp(y[0]) * x(y); };
  const Vec expected = std::exp(m[0]) * (v[0] * x(m) + nabla.nabla(m, v, x));
  EXPECT_LT(max_abs(nabla.nabla(m, v, fx) - expected), 1e-6);
}

TEST_P(ConnectionProperties, HorizontalLiftOfUnitsStaysUnits) {
  Rng rng(35);
  const Vec m = sample_base(*model(), rng, 0.2);
  const Vec v = rng.uniform_vec(model()->base_dim, 0.1);
  const Arrow end = parallel_transport(S(), Path::straight(m, v), 0.0, 1.0, model()->unit_arrow(m));
  EXPECT_LT(max_abs(end.coords - model()->unit(m + v)), 1e-8);
}

TEST_P(ConnectionProperties, TransportAlongDifferentCurvesHasSameDerivative) {
  Rng rng(36);
  const Vec m = sample_base(*model(), rng, 0.1);
  const Vec v = rng.uniform_vec(model()->base_dim, 1.0);
  InfinitesimalOptions bent;
  bent.path_curvature = rng.uniform_vec(model()->base_dim, 1.0);
  const AlgebroidConnection a = infinitesimalize(S(), Provenance::ParallelTransport);
  const AlgebroidConnection b = infinitesimalize(S(), Provenance::ParallelTransport, bent);
  const Section x = section(rng, m);
  EXPECT_LT(max_abs(a.nabla(m, v, x) - b.nabla(m, v, x)), 1e-4);
}

INSTANTIATE_TEST_SUITE_P(Shipped, ConnectionProperties, ::testing::ValuesIn(cartan::testing::shipped_models()),
                         cartan::testing::param_name);

TEST(Connection, ClassicalProvenanceIsNotBuiltHere) {
  const ModelWithConnection mc = make_pair_groupoid(Box::cube(2, 1.0));
  EXPECT_THROW(infinitesimalize(mc.connection, Provenance::ClassicalOmega), DomainError);
  EXPECT_STREQ(provenance_name(Provenance::Linearized), "linearized");
}

TEST(Connection, TranslationParallelSectionsAreConstant) {
  // For the translation groupoid S is the jet of constant bisections, so constant
  // sections in the chart are parallel.
  const ModelWithConnection mc = make_action_groupoid(translation_action(2));
  const AlgebroidConnection nabla = infinitesimalize(mc.connection, Provenance::FlowFormula);
  const ModelPtr mp = mc.model;
  const Section x = [mp](const Vec& y) -> Vec { return algebroid_basis(*mp, y) * Eigen::Vector2d(0.3, -1.2); };
  EXPECT_LT(max_abs(nabla.nabla(Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(1, 1), x)), 1e-9);
}

TEST(Connection, IntegralBisectionIsHorizontal) {
  const ModelWithConnection mc = make_action_groupoid(se2_action());
  const GroupoidModel& M = *mc.model;
  Rng rng(37);
  const Vec g = sample_arrow(M, rng, 0.3);
  const Bisection b = integral_bisection(mc.connection, g);
  EXPECT_LT(max_abs(b(M.source(g)) - g), 1e-12);
  const Vec x = M.source(g) + Eigen::Vector2d(0.05, -0.03);
  EXPECT_LT(jet_distance(oracle_jet(M, b, x), mc.connection.at(b(x))), 1e-6);
}

TEST(Connection, VerifiedAttachesRecord) {
  const ModelWithConnection mc = make_pair_groupoid(Box::cube(2, 1.0));
  EXPECT_FALSE(mc.connection.record.verified);
  const CartanConnection v = verified(mc.connection);
  EXPECT_TRUE(v.record.verified);
  EXPECT_EQ(v.record.samples, 20);
}
