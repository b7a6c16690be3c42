#pragma once

// Multiplicativity checks, parallel transport along the horizontal distribution,
// and the infinitesimal connection on the algebroid obtained from a Cartan
// connection, either through flows of right-invariant fields or through the
// parallel action along a path.

#include "cartan/cartan_connection.hpp"
#include "cartan/groupoid.hpp"

#include <cstdint>

namespace cartan {

/// Samples composable pairs and compares S(g1 g2) with the oracle product S(g1) S(g2).
MultiplicativityRecord check_multiplicative(const CartanConnection& s, std::uint64_t seed, int count,
                                            double tolerance = 1e-7);

/// check_multiplicative followed by with_record.
CartanConnection verified(const CartanConnection& s, std::uint64_t seed = 7, int count = 20,
                          double tolerance = 1e-7);

/// A path in the base chart together with its velocity.
struct Path {
  std::function<Vec(double)> point;
  std::function<Vec(double)> velocity;

  static Path straight(const Vec& m, const Vec& v);
  /// m + t v + t^2 w.
  static Path quadratic(const Vec& m, const Vec& v, const Vec& w);
  /// Straight segment from a to b parameterized over [0, 1].
  static Path segment(const Vec& a, const Vec& b);
};

/// Horizontal lift g(t0) = g, dg/dt = mu_S(g) . gamma'(t), integrated to t1.
/// `steps` = 0 picks the RK4 step count from the duration.
Arrow parallel_transport(const CartanConnection& s, const Path& gamma, double t0, double t1,
                         const Arrow& g, int steps = 0);

/// The induced map of algebroid fibres g|_{gamma(t_from)} -> g|_{gamma(t_to)}.
AlgebroidVec parallel_action(const CartanConnection& s, const Path& gamma, double t_from,
                             double t_to, const AlgebroidVec& x);

/// Local bisection through g swept out by horizontal lifts of straight segments
/// leaving alpha(g); integral to D when D is involutive.
Bisection integral_bisection(const CartanConnection& s, const Vec& g, int steps = 40);

enum class Provenance {
  FlowFormula,       ///< t-derivatives of flows of right-invariant fields, by finite differences
  ParallelTransport, ///< derivative of the parallel action along a path
  ClassicalOmega,    ///< from a classical Cartan connection on a principal bundle
  Linearized,        ///< flow formula with the t-derivative at t = 0 taken in closed form
};

const char* provenance_name(Provenance p);

class AlgebroidConnection {
 public:
  ModelPtr model;
  Provenance provenance = Provenance::FlowFormula;
  /// (m, v, X) -> nabla_v X at m, an N-vector tangent to the source fibre at unit(m).
  std::function<Vec(const Vec& m, const Vec& v, const Section& x)> nabla;

  AlgebroidVec operator()(const Vec& m, const Vec& v, const Section& x) const {
    return AlgebroidVec{m, nabla(m, v, x)};
  }
};

struct InfinitesimalOptions {
  double t_step = 1e-3;  ///< outer t-derivative step (fourth-order central stencil)
  /// Second-order coefficient of the path used by the parallel-transport route.
  std::optional<Vec> path_curvature;
};

AlgebroidConnection infinitesimalize(const CartanConnection& s, Provenance method,
                                     const InfinitesimalOptions& opts = {});

}  // namespace cartan
