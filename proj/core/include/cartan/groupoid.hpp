#pragma once

// Lie groupoids presented in a single coordinate chart, their structure maps and
// tangent maps, the Lie algebroid (anchor and bracket), and the bisection-jet
// oracle that realizes multiplication in J^1 G directly from its definition.
//
// Conventions: source alpha(gh) = alpha(h), target beta(gh) = beta(g); arrows
// compose right to left. Local bisections are right inverses of alpha. Algebroid
// elements are vectors at unit(m) tangent to the alpha-fibre, stored as N-vectors.

#include "cartan/chart_calculus.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace cartan {

/// m -> arrow coordinates; a local right inverse of the source map.
using Bisection = std::function<Vec(const Vec&)>;
/// m -> N-vector at unit(m) tangent to the source fibre.
using Section = std::function<Vec(const Vec&)>;

struct Arrow {
  Vec coords;
  Vec source;
  Vec target;
};

struct AlgebroidVec {
  Vec base;
  Vec vec;
};

/// An element of J^1 G: an arrow g together with mu: T_{alpha(g)}M -> T_g G (N x n).
struct Jet1 {
  Arrow arrow;
  Mat mu;

  const Vec& base() const { return arrow.source; }
};

/// Stencil for tangent maps of structure maps and for oracle jets. A fourth-order
/// stencil with a wide step keeps nested differentiation (brackets, connections,
/// curvature) well above roundoff.
inline const DiffOptions kStructureDiff{1e-3, 4, true};
/// Stencil for oracle one-jets of representative bisections. These are never
/// differentiated again, so a tighter step is affordable; inverted representatives
/// can be strongly curved.
inline const DiffOptions kOracleDiff{1e-4, 4, true};

/// Thresholds used for structural checks throughout the library.
struct StructuralTolerances {
  double composability = 1e-8;
  double verticality = 1e-8;
  double bisection = 1e-9;
  double singular = 1e-9;
};

/// Coordinates on the source fibre over a base point m0 of a transitive model,
/// written as (m, f) with m the target of the arrow and f a coordinate on the
/// isotropy group at m0; f = 0 is the distinguished arrow over each m.
struct FibreChart {
  int fibre_dim = 0;
  Box fibre_box;  ///< sampling box for f
  std::function<Vec(const Vec& m0, const Vec& p)> to_arrow;
  std::function<Vec(const Vec& m0, const Vec& g)> from_arrow;
};

class GroupoidModel {
 public:
  std::string name;
  int base_dim = 0;   ///< n = dim M
  int arrow_dim = 0;  ///< N = chart dimension of G

  ChartMap source;  ///< alpha: R^N -> R^n
  ChartMap target;  ///< beta: R^N -> R^n
  ChartMap unit;    ///< iota_M: R^n -> R^N

  /// Groupoid product on composable pairs (alpha(g) == beta(h)).
  std::function<Vec(const Vec& g, const Vec& h)> multiply;
  std::function<Vec(const Vec& g)> inverse;
  /// g' near g with alpha(g') == beta(h); identity on composable pairs.
  std::function<Vec(const Vec& g, const Vec& h)> retract_source;
  /// h' near h with beta(h') == alpha(g); identity on composable pairs. Optional.
  std::function<Vec(const Vec& h, const Vec& g)> retract_target;
  /// A local bisection whose one-jet at the jet's base is the given jet.
  std::function<Bisection(const Jet1&)> extend_bisection;

  Box base_box;   ///< sampling box for base points
  Box arrow_box;  ///< sampling box for arrow coordinates (source coords are overwritten)
  /// Chart domain of G; horizontal lifts leaving it raise EscapeError.
  std::optional<Box> domain;
  /// Present on transitive models that support recovering a classical connection.
  std::optional<FibreChart> fibre_chart;

  StructuralTolerances tol;

  /// Smooth extension of `multiply` off the composable set (retraction first).
  Vec product(const Vec& g, const Vec& h) const;
  Arrow arrow(const Vec& coords) const;
  Arrow unit_arrow(const Vec& m) const;
  /// Arrow near `g` with source moved to `m`.
  Vec with_source(const Vec& g, const Vec& m) const;
  int algebroid_rank() const { return arrow_dim - base_dim; }

  Mat source_jacobian(const Vec& g) const;
  Mat target_jacobian(const Vec& g) const;
  Mat unit_jacobian(const Vec& m) const;
};

using ModelPtr = std::shared_ptr<const GroupoidModel>;

// ---------------------------------------------------------------------------
// Tangent maps of structure maps.

enum class StructureMap { LeftTranslation, RightTranslation, Inversion, Source, Target };

/// Tangent map of L_g at h (h -> gh). Requires alpha(g) == beta(h).
Mat left_translation_jacobian(const GroupoidModel& model, const Vec& g, const Vec& h);
/// Tangent map of R_g at k (k -> kg). Requires alpha(k) == beta(g).
Mat right_translation_jacobian(const GroupoidModel& model, const Vec& g, const Vec& k);
Mat inversion_jacobian(const GroupoidModel& model, const Vec& g);

/// Dispatcher over the structure maps. For translations `g` is the translating
/// arrow and `at` the point of application; for the others `g` is ignored.
Vec tangent_map(const GroupoidModel& model, StructureMap which, const Vec& g, const Arrow& at,
                const Vec& v);

// ---------------------------------------------------------------------------
// Lie algebroid.

/// Matrix of the anchor at m: T beta at unit(m), n x N.
Mat anchor_matrix(const GroupoidModel& model, const Vec& m);
Vec anchor(const GroupoidModel& model, const AlgebroidVec& x);
/// Throws ToleranceError if `x` is not tangent to the source fibre.
void check_algebroid_vec(const GroupoidModel& model, const AlgebroidVec& x, double tol = 1e-9);

/// Orthonormal basis (N x r) of ker T alpha at unit(m), built by Gram-Schmidt on
/// the projected coordinate axes in a fixed order.
Mat algebroid_basis(const GroupoidModel& model, const Vec& m);

/// Right-invariant extension X^R(g) = T R_g . X(beta(g)).
Vec right_invariant(const GroupoidModel& model, const Section& x, const Vec& g);

/// Algebroid bracket [X, Y](m) from right-invariant extensions.
AlgebroidVec algebroid_bracket(const GroupoidModel& model, const Section& x, const Section& y,
                               const Vec& m, const DiffOptions& opts = kStructureDiff);

// ---------------------------------------------------------------------------
// Bisection-jet oracle.

/// One-jet of the bisection `b` at m (numerical tangent map).
Jet1 oracle_jet(const GroupoidModel& model, const Bisection& b, const Vec& m,
                const DiffOptions& opts = kOracleDiff);

/// (b1 b2)(m) = b1(beta(b2(m))) b2(m).
Bisection compose_bisections(const GroupoidModel& model, Bisection b1, Bisection b2);

/// Inverse bisection m' -> inv(b(phi^{-1}(m'))), phi = beta o b, via Newton iteration.
Bisection invert_bisection(const GroupoidModel& model, Bisection b, const Vec& near_source);

/// Ground-truth product in J^1 G through representative bisections.
Jet1 oracle_jet_mul(const GroupoidModel& model, const Jet1& j1, const Jet1& j2,
                    const DiffOptions& opts = kOracleDiff);
Jet1 oracle_jet_inverse(const GroupoidModel& model, const Jet1& j, const DiffOptions& opts = kOracleDiff);

/// Identity jet T_m iota_M at m.
Jet1 identity_jet(const GroupoidModel& model, const Vec& m);

/// Throws NotABisectionError/SingularError when the jet conditions fail.
void check_jet(const GroupoidModel& model, const Jet1& j, double tol = 1e-9);

/// Max-abs distance between two jets (arrow coordinates and matrices).
double jet_distance(const Jet1& a, const Jet1& b);

/// Affine-in-chart bisection g + mu (m' - m); exact when alpha is a coordinate projection.
Bisection affine_bisection(const Jet1& j);

}  // namespace cartan
