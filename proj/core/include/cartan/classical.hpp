#pragma once

// Classical Cartan connections on a trivialized principal bundle and the bridge
// to the groupoid picture: the gauge groupoid with its induced connection,
// recovery of the form from a connection on a transitive groupoid, the induced
// algebroid connection, and the curvature form with its covariant derivative.

#include "cartan/connection.hpp"
#include "cartan/models.hpp"

namespace cartan {

/// V-valued form on P. P is presented in coordinates (m, f) with p = sigma(m) h(f);
/// sigma(m) = (m, 0) is the slice and f = 0 the identity of H.
struct ClassicalCartan {
  std::string name;
  int base_dim = 0;   ///< n
  int fibre_dim = 0;  ///< k = dim H; dim V = dim P = n + k

  /// p h(f).
  std::function<Vec(const Vec& p, const Vec& f)> right_action;
  /// f coordinate of h(f)^{-1}.
  std::function<Vec(const Vec& f)> h_inverse;
  /// omega_p(v) in V.
  std::function<Vec(const Vec& p, const Vec& v)> omega;
  /// V x k: the elements of h generating the f-coordinate axes.
  Mat h_basis;
  /// Right representation xi -> xi h(f) on V.
  std::function<Vec(const Vec& f, const Vec& xi)> h_rep;

  Box base_box;
  Box fibre_box;

  int dim() const { return base_dim + fibre_dim; }
  Vec slice(const Vec& m) const;
  /// Matrix of omega_p in P coordinates.
  Mat matrix(const Vec& p) const;
  /// Fundamental field of the k-th generator at p.
  Vec fundamental(const Vec& p, int k) const;
};

/// Residuals of the defining conditions at a point.
struct ClassicalInvariants {
  double fundamental = 0.0;    ///< max |omega(xi^dagger) - xi|
  double equivariance = 0.0;   ///< max |omega_{ph}(v h) - omega_p(v) h|
  double min_singular = 0.0;   ///< smallest singular value of omega_p
};

ClassicalInvariants check_classical(const ClassicalCartan& w, const Vec& p, const Vec& v, const Vec& f);

using VBracket = std::function<Vec(const Vec&, const Vec&)>;

/// Brackets on V in the right-invariant convention, i.e. the negative of the
/// matrix commutator. Coordinates on se(2) are (tx, ty, rotation); on so(3) the
/// rotation-vector components.
Vec se2_bracket(const Vec& a, const Vec& b);
Vec so3_bracket(const Vec& a, const Vec& b);

/// Left Maurer-Cartan form of SE(2) with H = SO(2).
ClassicalCartan maurer_cartan_se2();
/// Left Maurer-Cartan form of SO(3) with H = SO(2), over the stereographic chart of S^2.
ClassicalCartan maurer_cartan_so3();
/// The rotation of SO(3) with coordinates (m, phi): sigma(m) R_z(phi).
Eigen::Matrix3d so3_point(const Vec& p);

/// Gauge groupoid (P x P)/H in slice coordinates (q, m_p) = [(q, sigma(m_p))], with
/// the connection induced by omega. Throws SliceError when the slice or the
/// coset normalization is inconsistent on the box.
ModelWithConnection classical_to_groupoid(const ClassicalCartan& w);

/// Classical form on the source fibre over m0 of a transitive model with a fibre
/// chart: omega(v) = Ad_{S(g)}^{-1} (TR_{g^{-1}} v), in an orthonormal basis of g|_{m0}.
/// Throws TransitivityError when the model is not transitive at m0 or has no fibre chart.
ClassicalCartan recover_omega(const CartanConnection& s, const Vec& m0);

/// Linear map L: V_a -> V_b with omega_b = L omega_a at p0.
Mat omega_identification(const ClassicalCartan& a, const ClassicalCartan& b, const Vec& p0);

/// The algebroid connection induced by omega on the gauge model built by
/// classical_to_groupoid(w).
AlgebroidConnection nabla_omega(const ClassicalCartan& w, ModelPtr gauge);

/// Covariant derivative nabla-bar_X Y of the form, characterised by
/// omega(nabla-bar_X Y) = X . omega(Y), for a vector field Y on P.
Vec nabla_bar(const ClassicalCartan& w, const Vec& p, const Vec& x, const VectorFn& y);

struct ClassicalCurvature {
  Vec point;
  /// Omega(d_i, d_j) for i < j in lexicographic order.
  std::vector<Vec> pairs;
  /// max |Omega|.
  double curvature = 0.0;
  /// max over directions of |d (Omega(omega^{-1} a, omega^{-1} b))|, the covariant
  /// derivative of Omega evaluated on parallel fields.
  double covariant_derivative = 0.0;
};

/// Omega(X, Y) = d omega(X, Y) - [omega X, omega Y] for constant coordinate fields X, Y.
Vec curvature_form(const ClassicalCartan& w, const VBracket& bracket, const Vec& p, const Vec& x,
                   const Vec& y);

/// Requires an explicit bracket on V; there is no default.
ClassicalCurvature classical_curvature(const ClassicalCartan& w, const VBracket& bracket, const Vec& p);

}  // namespace cartan
