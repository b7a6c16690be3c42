#include "shipped_models.hpp"

#include "cartan/errors.hpp"
#include "cartan/sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cartan;
using cartan::testing::max_abs;

TEST(Rotations, ExpLogRoundTrip) {
  const Eigen::Vector3d rho(0.3, -0.2, 0.9);
  const Eigen::Matrix3d r = rotation_exp(rho);
  EXPECT_LT((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-14);
  EXPECT_LT((rotation_log(r) - rho).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((rotation_exp(Eigen::Vector3d(0, 0, M_PI / 2)) * Eigen::Vector3d::UnitX() - Eigen::Vector3d::UnitY())
                .cwiseAbs()
                .maxCoeff(),
            1e-15);
}

TEST(Rotations, StereographicRoundTrip) {
  const Vec m = Eigen::Vector2d(0.4, -0.7);
  const Eigen::Vector3d s = stereo_to_sphere(m);
  EXPECT_NEAR(s.norm(), 1.0, 1e-14);
  EXPECT_LT(max_abs(sphere_to_stereo(s) - m), 1e-14);
  EXPECT_LT((stereo_to_sphere(Vec::Zero(2)) - Eigen::Vector3d::UnitZ()).norm(), 1e-15);
}

TEST(Metrics, SquareRootAndDerivative) {
  Eigen::Matrix2d a;
  a << 2.0, 0.3, 0.3, 1.0;
  const Eigen::Matrix2d r = sqrt_spd2(a);
  EXPECT_LT((r * r - a).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((r - r.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  Eigen::Matrix2d da;
  da << 0.1, -0.2, -0.2, 0.4;
  const double h = 1e-5;
  const Eigen::Matrix2d fd = (sqrt_spd2(a + h * da) - sqrt_spd2(a - h * da)) / (2 * h);
  EXPECT_LT((sqrt_spd2_derivative(a, da) - fd).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Metrics, ShippedValues) {
  const Vec x = Eigen::Vector2d(0.5, 0.0);
  EXPECT_NEAR(sphere_metric()(x)(0, 0), 4.0 / (1.25 * 1.25), 1e-15);
  EXPECT_NEAR(hyperbolic_metric()(x)(1, 1), 4.0 / (0.75 * 0.75), 1e-14);
  EXPECT_NEAR(perturbed_metric(2.0)(x)(0, 0), 1.5, 1e-15);
  EXPECT_NEAR(perturbed_metric(2.0)(x)(0, 1), 0.0, 1e-15);
  EXPECT_THROW(hyperbolic_metric()(Eigen::Vector2d(1.0, 0.5)), MetricError);
}

TEST(IsoJet, ModelShape) {
  const IsoJetModel m = make_isometry_jet_groupoid(sphere_metric(), Box::cube(2, 0.6), "isojet-sphere");
  EXPECT_EQ(m.model->arrow_dim, 5);
  EXPECT_EQ(m.model->base_dim, 2);
  EXPECT_EQ(m.model->algebroid_rank(), 3);
}

TEST(IsoJet, HyperbolicBoxOutsideDiscIsRejected) {
  EXPECT_THROW(make_isometry_jet_groupoid(hyperbolic_metric(), Box::cube(2, 1.2), "bad"), MetricError);
  MetricChart indefinite;
  indefinite.dim = 2;
  indefinite.g = [](const Vec&) { return Mat(Eigen::Vector2d(1.0, -1.0).asDiagonal()); };
  EXPECT_THROW(make_isometry_jet_groupoid(indefinite, Box::cube(2, 0.5), "bad"), MetricError);
}

TEST(IsoJet, ArrowsAreIsometries) {
  const IsoJetModel m = make_isometry_jet_groupoid(hyperbolic_metric(), Box::cube(2, 0.4), "isojet-hyperbolic");
  Rng rng(51);
  for (int i = 0; i < 20; ++i) {
    const Vec g = sample_arrow(*m.model, rng);
    const Eigen::Matrix2d a = m.geometry->isometry(g);
    const Mat gm = hyperbolic_metric()(g.head(2));
    const Mat g0 = hyperbolic_metric()(g.tail(2));
    EXPECT_LT(max_abs(a.transpose() * gm * a - g0), 1e-12);
    EXPECT_GT(a.determinant(), 0.0);
    // The anchor of S(g) is the isometry itself.
    EXPECT_LT(max_abs(m.model->target_jacobian(g) * m.connection.mu(g) - Mat(a)), 1e-9);
  }
}

TEST(IsoJet, EuclideanConnectionIsJetOfRigidMotion) {
  const IsoJetModel m = make_isometry_jet_groupoid(euclidean_metric(), Box::cube(2, 1.0), "isojet-flat");
  Rng rng(52);
  for (int i = 0; i < 10; ++i) {
    const Vec g = sample_arrow(*m.model, rng, 0.05);
    const Vec base = g.tail(2);
    const Bisection rigid = [g, base](const Vec& x) -> Vec {
      Vec out(5);
      out.head(2) = g.head(2) + rotation2(g[2]) * (x - base);
      out[2] = g[2];
      out.tail(2) = x;
      return out;
    };
    EXPECT_LT(jet_distance(m.connection.at(g), oracle_jet(*m.model, rigid, base)), 1e-8);
  }
}

TEST(IsoJet, ProlongationIsHolonomicAndMetricCompatible) {
  // Differentiating A along the extended bisection must give a symmetric second
  // derivative and preserve the metric to first order.
  const IsoJetModel m = make_isometry_jet_groupoid(sphere_metric(), Box::cube(2, 0.6), "isojet-sphere");
  const MetricChart metric = sphere_metric();
  const VectorFn flat = [&metric](const Vec& x) -> Vec {
    const Mat g = metric(x);
    return Eigen::Map<const Vec>(g.data(), 4);
  };
  Rng rng(53);
  for (int i = 0; i < 10; ++i) {
    const Vec g = sample_arrow(*m.model, rng, 0.05);
    const Bisection b = m.model->extend_bisection(m.connection.at(g));
    const VectorFn along = [&](const Vec& x) -> Vec {
      const Eigen::Matrix2d a = m.geometry->isometry(b(x));
      return Eigen::Map<const Vec>(a.data(), 4);
    };
    const Mat jac = jacobian_fd(along, g.tail(2), kOracleDiff);
    const Eigen::Matrix2d h0 = Eigen::Map<const Eigen::Matrix2d>(jac.col(0).data());
    const Eigen::Matrix2d h1 = Eigen::Map<const Eigen::Matrix2d>(jac.col(1).data());
    EXPECT_LT((h0.col(1) - h1.col(0)).cwiseAbs().maxCoeff(), 1e-7);

    const Eigen::Matrix2d a = m.geometry->isometry(g);
    const Eigen::Matrix2d gp = metric(g.head(2));
    const std::array<Eigen::Matrix2d, 2> h{h0, h1};
    for (int k = 0; k < 2; ++k) {
      const Vec dgp = directional_fd(flat, g.head(2), a.col(k), kOracleDiff);
      const Vec dg = directional_fd(flat, g.tail(2), Vec::Unit(2, k), kOracleDiff);
      const Eigen::Matrix2d lhs = h[k].transpose() * gp * a +
                                  a.transpose() * Eigen::Map<const Eigen::Matrix2d>(dgp.data()) * a +
                                  a.transpose() * gp * h[k];
      EXPECT_LT((lhs - Eigen::Map<const Eigen::Matrix2d>(dg.data())).cwiseAbs().maxCoeff(), 1e-7);
    }
  }
}

TEST(ActionModels, SE2GroupLaw) {
  const GroupAction a = se2_action();
  const Vec g = Eigen::Vector3d(0.2, -0.1, 0.4);
  const Vec h = Eigen::Vector3d(-0.3, 0.5, -0.7);
  const Vec m = Eigen::Vector2d(0.1, 0.3);
  EXPECT_LT(max_abs(a.act(a.multiply(g, h), m) - a.act(g, a.act(h, m))), 1e-14);
  EXPECT_LT(max_abs(a.multiply(g, a.inverse(g)) - a.identity), 1e-14);
}

TEST(ActionModels, SO3ActsOnStereographicChart) {
  const GroupAction a = so3_sphere_action();
  const Vec rho = Eigen::Vector3d(0.1, 0.2, -0.3);
  const Vec m = Eigen::Vector2d(0.2, -0.1);
  const Eigen::Vector3d expected = rotation_exp(rho) * stereo_to_sphere(m);
  EXPECT_LT((stereo_to_sphere(a.act(rho, m)) - expected).norm(), 1e-13);
}
