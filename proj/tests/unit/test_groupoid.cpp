#include "shipped_models.hpp"

#include "cartan/errors.hpp"
#include "cartan/sampling.hpp"

#include <gtest/gtest.h>

using namespace cartan;
using cartan::testing::max_abs;

class GroupoidLaws : public ::testing::TestWithParam<cartan::testing::Named> {
 protected:
  const GroupoidModel& model() const { return *GetParam().mc.model; }
};

TEST_P(GroupoidLaws, AssociativityUnitsInverses) {
  const GroupoidModel& M = model();
  Rng rng(11);
  for (int i = 0; i < 25; ++i) {
    const auto [g, h] = sample_composable(M, rng, 0.05);
    const Vec k = M.inverse(sample_arrow_from(M, rng, M.source(h), 0.05));
    EXPECT_LT(max_abs(M.multiply(M.multiply(g, h), k) - M.multiply(g, M.multiply(h, k))), 1e-10);
    EXPECT_LT(max_abs(M.multiply(g, M.unit(M.source(g))) - g), 1e-12);
    EXPECT_LT(max_abs(M.multiply(M.unit(M.target(g)), g) - g), 1e-12);
    EXPECT_LT(max_abs(M.inverse(M.inverse(g)) - g), 1e-12);
    EXPECT_LT(max_abs(M.source(M.multiply(g, h)) - M.source(h)), 1e-12);
    EXPECT_LT(max_abs(M.target(M.multiply(g, h)) - M.target(g)), 1e-12);
  }
}

TEST_P(GroupoidLaws, ExtendedBisectionReproducesJet) {
  const GroupoidModel& M = model();
  Rng rng(12);
  for (int i = 0; i < 15; ++i) {
    const Jet1 j = sample_jet(M, rng, sample_arrow(M, rng, 0.05));
    EXPECT_NO_THROW(check_jet(M, j));
    EXPECT_LT(jet_distance(oracle_jet(M, M.extend_bisection(j), j.base()), j), 1e-8);
  }
}

TEST_P(GroupoidLaws, AlgebroidBasisIsOrthonormalAndVertical) {
  const GroupoidModel& M = model();
  Rng rng(13);
  for (int i = 0; i < 10; ++i) {
    const Vec m = sample_base(M, rng);
    const Mat b = algebroid_basis(M, m);
    ASSERT_EQ(b.cols(), M.algebroid_rank());
    EXPECT_LT(max_abs(b.transpose() * b - Mat::Identity(b.cols(), b.cols())), 1e-12);
    EXPECT_LT(max_abs(M.source_jacobian(M.unit(m)) * b), 1e-9);
  }
}

TEST_P(GroupoidLaws, AnchorIsBracketHomomorphism) {
  const GroupoidModel& M = model();
  Rng rng(14);
  const Vec m = sample_base(M, rng, 0.2);
  const Vec a = rng.uniform_vec(M.algebroid_rank(), 1.0);
  const Vec c = rng.uniform_vec(M.algebroid_rank(), 1.0);
  const Mat s = rng.uniform_mat(M.algebroid_rank(), M.base_dim, 1.0);
  const GroupoidModel* mp = &M;
  const Section x = [mp, a, m](const Vec& y) -> Vec { return algebroid_basis(*mp, y) * a; };
  const Section y = [mp, c, s, m](const Vec& z) -> Vec { return algebroid_basis(*mp, z) * (c + s * (z - m)); };
  const VectorFn ax = [mp, x](const Vec& z) { return anchor(*mp, AlgebroidVec{z, x(z)}); };
  const VectorFn ay = [mp, y](const Vec& z) { return anchor(*mp, AlgebroidVec{z, y(z)}); };
  const DiffOptions d{1e-3, 4, true};
  const Vec lie = jacobian_fd(ay, m, d) * ax(m) - jacobian_fd(ax, m, d) * ay(m);
  const AlgebroidVec br = algebroid_bracket(M, x, y, m);
  EXPECT_LT(max_abs(anchor(M, br) - lie), 1e-6);
  // Antisymmetry of the bracket.
  EXPECT_LT(max_abs(br.vec + algebroid_bracket(M, y, x, m).vec), 1e-8);
}

TEST_P(GroupoidLaws, InversionTangentAtUnits) {
  const GroupoidModel& M = model();
  Rng rng(15);
  for (int i = 0; i < 10; ++i) {
    const Vec m = sample_base(M, rng);
    const Vec x = algebroid_basis(M, m) * rng.uniform_vec(M.algebroid_rank(), 1.0);
    const Vec expected = M.unit_jacobian(m) * anchor(M, AlgebroidVec{m, x}) - x;
    EXPECT_LT(max_abs(inversion_jacobian(M, M.unit(m)) * x - expected), 1e-8);
  }
}

INSTANTIATE_TEST_SUITE_P(Shipped, GroupoidLaws, ::testing::ValuesIn(cartan::testing::shipped_models()),
                         cartan::testing::param_name);

// Pair groupoid of the line: arrows (q, p) from p to q.
class PairLine : public ::testing::Test {
 protected:
  ModelPtr M = make_pair_groupoid(Box::cube(1, 3.0)).model;

  static Vec v2(double a, double b) { return Eigen::Vector2d(a, b); }
  static Vec v1(double a) { return Vec::Constant(1, a); }
};

TEST_F(PairLine, RightTranslationFixesFirstSlot) {
  const Vec g = v2(0.3, 0.1);
  const Mat tr = right_translation_jacobian(*M, M->inverse(g), v2(0.5, 0.1));
  EXPECT_LT(max_abs(tr * v2(1.7, 0.0) - v2(1.7, 0.0)), 1e-12);
}

TEST_F(PairLine, BisectionComposition) {
  const Bisection b1 = [](const Vec& m) { return Vec(Eigen::Vector2d(3 * m[0], m[0])); };
  const Bisection b2 = [](const Vec& m) { return Vec(Eigen::Vector2d(2 * m[0], m[0])); };
  const Vec out = compose_bisections(*M, b1, b2)(v1(0.4));
  EXPECT_NEAR(out[0], 2.4, 1e-14);
  EXPECT_NEAR(out[1], 0.4, 1e-14);
}

TEST_F(PairLine, InvertedBisectionOfDoubling) {
  const Bisection b = [](const Vec& m) { return Vec(Eigen::Vector2d(2 * m[0], m[0])); };
  const Bisection inv = invert_bisection(*M, b, v1(1.0));
  const Vec at = inv(v1(2.0));
  EXPECT_NEAR(at[0], 1.0, 1e-10);
  EXPECT_NEAR(at[1], 2.0, 1e-10);
}

TEST_F(PairLine, OracleJetOfDoubling) {
  const Bisection b = [](const Vec& m) { return Vec(Eigen::Vector2d(2 * m[0], m[0])); };
  const Jet1 j = oracle_jet(*M, b, v1(1.0));
  EXPECT_NEAR(j.mu(0, 0), 2.0, 1e-10);
  EXPECT_NEAR(j.mu(1, 0), 1.0, 1e-10);
  const Jet1 inv = oracle_jet_inverse(*M, j);
  EXPECT_NEAR(inv.arrow.coords[0], 1.0, 1e-12);
  EXPECT_NEAR(inv.arrow.coords[1], 2.0, 1e-12);
  EXPECT_NEAR(inv.mu(0, 0), 0.5, 1e-8);
}

TEST_F(PairLine, JetConditionsAreEnforced) {
  Jet1 j{M->arrow(v2(2.0, 1.0)), Mat(2, 1)};
  j.mu << 2.0, 0.5;  // T alpha mu = 0.5
  EXPECT_THROW(check_jet(*M, j), NotABisectionError);
  j.mu << 0.0, 1.0;  // T beta mu = 0
  EXPECT_THROW(check_jet(*M, j), SingularError);
  j.mu << 2.0, 1.0;
  EXPECT_NO_THROW(check_jet(*M, j));
}

TEST_F(PairLine, IdentityJetAndAnchor) {
  const Jet1 id = identity_jet(*M, v1(0.2));
  EXPECT_LT(max_abs(id.mu - Mat::Ones(2, 1)), 1e-14);
  EXPECT_NEAR(anchor(*M, AlgebroidVec{v1(0.2), v2(1.5, 0.0)})[0], 1.5, 1e-12);
  EXPECT_THROW(check_algebroid_vec(*M, AlgebroidVec{v1(0.2), v2(0.0, 1.0)}), ToleranceError);
}
