#pragma once

// Concrete groupoid models with their canonical Cartan connections: pair
// groupoids, action groupoids of matrix groups, and the groupoid of orientation
// preserving isometric tangent maps of a surface with its prolongation connection.

#include "cartan/cartan_connection.hpp"
#include "cartan/groupoid.hpp"

namespace cartan {

struct ModelWithConnection {
  ModelPtr model;
  CartanConnection connection;
};

/// Pair groupoid of a chart box. Chart (q, p) with alpha = p, beta = q; S is the
/// one-jet of the chart translation m -> (q + m - p, m).
ModelWithConnection make_pair_groupoid(const Box& box);

/// A matrix group in a single chart acting on a base chart.
struct GroupAction {
  std::string name;
  int group_dim = 0;
  int base_dim = 0;
  std::function<Vec(const Vec&, const Vec&)> multiply;
  std::function<Vec(const Vec&)> inverse;
  Vec identity;
  std::function<Vec(const Vec& a, const Vec& m)> act;
  Box group_box;
  Box base_box;
  std::optional<Box> base_domain;
  std::optional<FibreChart> fibre_chart;
};

/// Action groupoid G0 x M in chart (a, m): alpha = m, beta = a.m. S is the jet of
/// the constant bisection m' -> (a, m').
ModelWithConnection make_action_groupoid(const GroupAction& action);

GroupAction translation_action(int n, double half_width = 1.0);
/// SE(2) = (tx, ty, theta) acting on the plane by rotation then translation.
GroupAction se2_action(double half_width = 1.0);
/// SO(3) in rotation-vector coordinates acting on the stereographic chart of S^2.
GroupAction so3_sphere_action(double half_width = 0.5);

// Rotation helpers shared with the classical examples.
Eigen::Matrix3d rotation_exp(const Eigen::Vector3d& rho);
Eigen::Vector3d rotation_log(const Eigen::Matrix3d& r);
/// Point of the unit sphere with stereographic coordinates m (north pole at m = 0).
Eigen::Vector3d stereo_to_sphere(const Vec& m);
Vec sphere_to_stereo(const Eigen::Vector3d& s);
Eigen::Matrix2d rotation2(double theta);

// ---------------------------------------------------------------------------
// Surface metrics and the isometric-jet groupoid.

MetricChart euclidean_metric();
/// 4 / (1 + |x|^2)^2 delta.
MetricChart sphere_metric();
/// 4 / (1 - |x|^2)^2 delta.
MetricChart hyperbolic_metric();
/// (1 + eps x1^2) delta, with x1 the first coordinate.
MetricChart perturbed_metric(double eps);

/// Symmetric square root of a 2x2 symmetric positive-definite matrix and its
/// derivative along dA.
Eigen::Matrix2d sqrt_spd2(const Eigen::Matrix2d& a);
Eigen::Matrix2d sqrt_spd2_derivative(const Eigen::Matrix2d& a, const Eigen::Matrix2d& da);

/// Geometry of the isometric-jet chart (m', theta, m): the isometry
/// A = E(m') R(theta) E(m)^{-1} with E = g^{-1/2}.
class IsoJetGeometry {
 public:
  explicit IsoJetGeometry(MetricChart metric) : metric_(std::move(metric)) {}

  const MetricChart& metric() const { return metric_; }
  /// g(x)^{1/2}; throws MetricError if g(x) is not positive definite.
  Eigen::Matrix2d root(const Vec& x) const;
  Eigen::Matrix2d root_derivative(const Vec& x, const Vec& u) const;
  /// Orthonormal frame E(x) = g(x)^{-1/2}.
  Eigen::Matrix2d frame(const Vec& x) const;
  Eigen::Matrix2d isometry(const Vec& g) const;
  /// Matrix part of the prolongation connection at g (5 x 2).
  Mat prolongation(const Vec& g) const;

 private:
  MetricChart metric_;
};

struct IsoJetModel {
  ModelPtr model;
  CartanConnection connection;
  std::shared_ptr<const IsoJetGeometry> geometry;
};

/// Chart (m', theta, m) with alpha = m, beta = m'. Throws MetricError when the
/// metric fails positivity on the base box.
IsoJetModel make_isometry_jet_groupoid(const MetricChart& metric, const Box& base_box,
                                       const std::string& name, double angle_half_width = 1.0);

}  // namespace cartan
